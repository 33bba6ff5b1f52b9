#ifndef CKFZ_OPERATORS_HPP_
#define CKFZ_OPERATORS_HPP_

// Pointwise spinor operators built from a conformal Killing field X and a potential A:
//
//   D  = sigma.(-i grad - A)
//   Q  = X.(-i grad - A) + sigma.Y / 4 - (2/3) i div X,   Y = curl X
//   S  = w^-1 sigma.X,  P+- = (I +- S) / 2,               w = |X|
//   Dw = D composed with multiplication by w
//
// The templates take any generic callable y -> Spinor<S>(y) so that they can be
// composed; each composition level consumes one level of dual numbers.

#include <cstdint>
#include <optional>
#include <utility>

#include "ckfz/ckf.hpp"
#include "ckfz/potential.hpp"
#include "ckfz/spinor_field.hpp"

namespace ckfz {

inline constexpr double kParallelTol = 1e-8;

namespace ops {

template <class T>
T weight(const CkfParams& p, const Vec3<T>& x) {
  return sqrt(eval_ckf(p, x).squaredNorm());
}

template <class T, class F>
Spinor<T> dirac(const PotentialSpec& spec, F&& f, const Vec3<T>& x) {
  const SpinorJet<T> jet = spinor_jet(f, x);
  Spinor<T> out = Spinor<T>{} - pauli_dot(eval_potential(spec, x), jet.value);
  for (int k = 0; k < 3; ++k) out -= times_i(pauli(k, jet.partial[k]));
  return out;
}

template <class T, class F>
Spinor<T> q_op(const CkfParams& p, const PotentialSpec& spec, F&& f, const Vec3<T>& x) {
  const SpinorJet<T> jet = spinor_jet(f, x);
  const Vec3<T> X = eval_ckf(p, x);
  const Vec3<T> A = eval_potential(spec, x);
  Spinor<T> grad;
  for (int k = 0; k < 3; ++k) grad += X[k] * jet.partial[k];
  const T xa = X.dot(A);
  const T div = div_ckf(p, x);
  // X.(-i grad - A) f + sigma.Y f / 4 - (2/3) i div f
  Spinor<T> out = Spinor<T>{} - times_i(grad) - xa * jet.value;
  out += T(0.25) * pauli_dot(curl_ckf(p, x), jet.value);
  out -= times_i((T(2.0 / 3.0) * div) * jet.value);
  return out;
}

template <class T, class F>
Spinor<T> s_op(const CkfParams& p, F&& f, const Vec3<T>& x) {
  const Vec3<T> X = eval_ckf(p, x);
  return (T(1.0) / sqrt(X.squaredNorm())) * pauli_dot(X, f(x));
}

// (I + sign S) / 2 applied to f.
template <class T, class F>
Spinor<T> proj_op(const CkfParams& p, int sign, F&& f, const Vec3<T>& x) {
  const Spinor<T> v = f(x);
  const Vec3<T> X = eval_ckf(p, x);
  const Spinor<T> sv = (T(1.0) / sqrt(X.squaredNorm())) * pauli_dot(X, v);
  return T(0.5) * (sign > 0 ? v + sv : v - sv);
}

template <class T, class F>
Spinor<T> dirac_w(const CkfParams& p, const PotentialSpec& spec, F&& f, const Vec3<T>& x) {
  return dirac(
      spec, [&](const auto& y) { return weight(p, y) * f(y); }, x);
}

}  // namespace ops

// sigma.(-i grad - A) f.
Spinor2 apply_D(const PotentialSpec& spec, const SpinorField& f, const Vector3d& x);
// Throws NotParallel when B is not parallel to X at x (residual above kParallelTol).
Spinor2 apply_Q(const CkfParams& p, const PotentialSpec& spec, const SpinorField& f, const Vector3d& x);
// Throws FrameUndefined when w(x) <= kFrameEps.
Spinor2 apply_S(const CkfParams& p, const SpinorField& f, const Vector3d& x);
Spinor2 apply_projection(const CkfParams& p, int sign, const SpinorField& f, const Vector3d& x);

// |B x X| / max(|B||X|, kParallelFloor) with X taken from p rather than the potential's parent field.
double parallelism_against(const CkfParams& p, const PotentialSpec& spec, const Vector3d& x);

struct CommutatorResiduals {
  double r1 = 0.0;  // |[Dw, Q] f|
  double r2 = 0.0;  // |[Q, S] f|
  double r3 = 0.0;  // |{Dw, S} f - 2 Q f - w^-1 (X.Y) S f / 2|
  double scale = 0.0;  // max(|Dw Q f|, |Q Dw f|, |Q S f|, |Dw S f|) for context
};

// Throws FrameUndefined and NotParallel.
CommutatorResiduals commutator_residuals(const CkfParams& p, const PotentialSpec& spec, const SpinorField& f,
                                         const Vector3d& x);

struct QuadratureSpec {
  int panels = 64;
  int order = 2;
  // Integration box; defaults to the support box of a compact field.
  std::optional<std::pair<Vector3d, Vector3d>> box;
  int threads = 1;

  int nodes_per_axis() const { return panels * order; }
};

struct NormDecomposition {
  double lhs = 0.0;  // ||Dw f||_w^2
  double t_plus = 0.0, t_minus = 0.0, q = 0.0;  // ||T+ f||_w^2, ||T- f||_w^2, ||Q f||_w^2
  double rel_err = 0.0;
  int nodes_per_axis = 0;
  long support_nodes = 0;  // nodes where f is nonzero
  double min_w_on_support = 0.0;
};

// All four weighted norms by tensor-product composite Gauss-Legendre quadrature.
// Throws SupportViolation if f is non-negligible on the box faces or on nodes where
// w < kSupportMinW; NotSimpleRotation if p does not satisfy X . curl X = 0.
inline constexpr double kSupportMinW = 1e-6;
NormDecomposition norm_decomposition_check(const CkfParams& p, const PotentialSpec& spec, const SpinorField& f,
                                           const QuadratureSpec& grid);

// The fixed non-increasing step: chi0(t) = 1 - I(t)/I(1), I(t) = int_0^t exp(-1/(s(1 - s))) ds.
double chi0(double t);
double chi0_prime(double t);
double chi0_prime_sup();

// chi_R(x) = chi0(log log|x| - log log R) for |x| > 1, else 1.
double chi_outer(double R, const Vector3d& x);
Vector3d grad_chi_outer(double R, const Vector3d& x);
// eta_eps(x) = chi_{1/eps}(1 / w(x)); zero where w = 0.
double eta_inner(const CkfParams& p, double eps, const Vector3d& x);

struct CutoffPair {
  double R = 7.38905609893065;  // e^2
  double eps = 0.1;
};

struct CutoffSampling {
  int n_radial = 512;
  int n_directions = 2048;
};

struct CutoffBound {
  double sup_outer = 0.0;  // max w^{1/2} |grad chi_R| over the shell R <= |x| <= R^e
  double bound = 0.0;      // 2 C ||chi0'||_inf / log R
  double constant_c = 0.0; // C with w^{1/2} <= C (1 + |x|)
};

// Throws InvalidArgument unless R > e.
CutoffBound cutoff_bound_check(const CkfParams& p, const CutoffPair& c, const CutoffSampling& s = {});

// A constant C with w(x)^{1/2} <= C (1 + |x|) for all x.
double growth_constant(const CkfParams& p);

}  // namespace ckfz

#endif  // CKFZ_OPERATORS_HPP_
