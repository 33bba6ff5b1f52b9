#ifndef CKFZ_CKF_HPP_
#define CKFZ_CKF_HPP_

// Conformal Killing fields on R^3.
//
// Every conformal Killing field is
//
//   X(x) = a + b0 x + b x x + (c.x) x - |x|^2 c / 2
//
// for a in R^3, b0 in R, b in R^3 and c in R^3. Fields with X . curl X == 0
// reduce, after a rigid motion and scaling, to a constant, a rotation about an
// axis, or the special field with parameter nu.

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ckfz/autodiff.hpp"
#include "ckfz/spinor.hpp"

namespace ckfz {

inline constexpr double kFrameEps = 1e-10;
inline constexpr double kClassifyEps = 1e-9;

struct CkfParams {
  Vector3d a = Vector3d::Zero();
  double b0 = 0.0;
  Vector3d b = Vector3d::Zero();
  Vector3d c = Vector3d::Zero();

  bool is_zero() const { return a.isZero(0.0) && b0 == 0.0 && b.isZero(0.0) && c.isZero(0.0); }
  // max(|a|, |b0|, |b|, |c|)
  double magnitude() const;
  bool finite() const;
};

CkfParams operator+(const CkfParams& p, const CkfParams& q);
CkfParams operator*(double s, const CkfParams& p);

// The constant field e3.
CkfParams ud_field();
// The rotation e3 x x.
CkfParams ro_field();
// mu^2/2 e3 + (e3.x) x - |x|^2 e3 / 2, for mu > 0.
CkfParams cr_field(double mu);

// Parses "ud", "ro" or "cr:<mu>". Returns nullopt for anything else.
std::optional<CkfParams> parse_shorthand(const std::string& text);

template <class T>
Vec3<T> eval_ckf(const CkfParams& p, const Vec3<T>& x) {
  const Vec3<T> a = lift<T>(p.a), b = lift<T>(p.b), c = lift<T>(p.c);
  const T cx = c.dot(x);
  const T xx = x.squaredNorm();
  return a + x * T(p.b0) + b.cross(x) + x * cx - c * (T(0.5) * xx);
}

// Closed forms; the tests re-derive them by automatic differentiation.
template <class T>
Vec3<T> curl_ckf(const CkfParams& p, const Vec3<T>& x) {
  const Vec3<T> b = lift<T>(p.b), c = lift<T>(p.c);
  return b * T(2) + c.cross(x) * T(2);
}

template <class T>
T div_ckf(const CkfParams& p, const Vec3<T>& x) {
  return T(3.0 * p.b0) + T(3) * lift<T>(p.c).dot(x);
}

// Laplacian of each component, -grad(div X)/3 = -c.
inline Vector3d laplacian_ckf(const CkfParams& p) { return -p.c; }

struct FieldFrame {
  Vector3d x;
  Vector3d X;
  double w = 0.0;
  double divX = 0.0;
  Vector3d Y;
  Vector3d XxY;
  // Populated only when w > kFrameEps and |Y| > kFrameEps.
  std::optional<Vector3d> T, N, B;
};

// Returns the frame at x; throws FrameUndefined when the unit vectors do not exist.
FieldFrame frame_at(const CkfParams& p, const Vector3d& x);
// Same as frame_at but leaves T, N, B empty instead of throwing.
FieldFrame field_data_at(const CkfParams& p, const Vector3d& x);

struct SimpleRotationResidual {
  double a_dot_b = 0.0;
  double c_dot_b = 0.0;
  Vector3d b0b_minus_cxa = Vector3d::Zero();

  double max_abs() const;
};

// X . curl X vanishes identically iff all three entries vanish.
SimpleRotationResidual simple_rotation_residual(const CkfParams& p);

enum class CkfKind { Translation, Dilation, Rotation, Special };

const char* to_string(CkfKind kind);

struct CanonicalForm {
  CkfKind kind = CkfKind::Translation;
  Vector3d x0 = Vector3d::Zero();
  // Unit direction of a (Translation), b (Rotation) or c (Special); zero for Dilation.
  Vector3d axis = Vector3d::Zero();
  // |a|, |b0|, |b| or |c|.
  double scale = 0.0;
  // Special only.
  double nu = 0.0;
  // Dilation only: sign of b0.
  double b0_sign = 1.0;
  bool admissible = false;

  // mu = sqrt(2 nu) for admissible Special fields, zero otherwise.
  double mu() const;
};

CanonicalForm classify(const CkfParams& p);
CkfParams reconstruct(const CanonicalForm& form);

// a, b0, b, c with entries uniform in [-1, 1].
CkfParams random_ckf(std::mt19937_64& rng);
// reconstruct() of a random canonical form of the given kind: unit axis, scale in
// [0.2, 1.5], centre in [-1, 1]^3 (orthogonal to the axis for rotations), nu in [-1, 1].
CkfParams random_simple_rotation(std::mt19937_64& rng, CkfKind kind);

// max_{i,j} |d_i Y_j + d_j Y_i| for Y = curl X, by nested automatic differentiation.
double killing_residual_of_curl(const CkfParams& p, const Vector3d& x);
// max_{i,j} |d_i X_j + d_j X_i - (2/3) div X delta_ij|.
double conformal_killing_residual(const CkfParams& p, const Vector3d& x);

// Monopole: dilation centre. Pair: the two zeros of a Special field with nu < 0.
// Dipole: the merged zero of a Special field with nu == 0.
enum class FixedPointKind { Monopole, Pair, Dipole };

const char* to_string(FixedPointKind kind);

struct FixedPoint {
  Vector3d point;
  FixedPointKind kind;
};

struct FixedPointCensus {
  std::vector<FixedPoint> isolated;
  // Degenerate zero locus of admissible fields.
  enum class Locus { None, Line, Circle } locus = Locus::None;
  Vector3d locus_center = Vector3d::Zero();
  Vector3d locus_axis = Vector3d::Zero();
  double locus_radius = 0.0;
};

// Zero set of a simple-rotation field from its canonical form; empty for fields
// that are not simple rotations.
FixedPointCensus fixed_point_census(const CkfParams& p);

}  // namespace ckfz

#endif  // CKFZ_CKF_HPP_
