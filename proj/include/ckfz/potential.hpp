#ifndef CKFZ_POTENTIAL_HPP_
#define CKFZ_POTENTIAL_HPP_

// Magnetic potentials A whose field B = curl A is parallel to a conformal Killing
// field. Every family is evaluated by one template over the scalar type, so B,
// div B and derivatives of A are exact.

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "ckfz/ckf.hpp"
#include "ckfz/curve.hpp"
#include "ckfz/profile.hpp"
#include "ckfz/spinor_field.hpp"

namespace ckfz {

inline constexpr double kParallelFloor = 1e-300;
inline constexpr double kLossYauTol = 1e-10;

struct PotentialSpec;
using PotentialPtr = std::shared_ptr<const PotentialSpec>;

struct PotentialSpec {
  enum class Kind { Zero, Axial, HopfBase, Modulated, LossYau, GaugeShift };
  // Invariants of the parent flow used by Modulated.
  enum class Invariants { Rotation, CrossRing };
  enum class Gauge { SinX1TimesX2, Linear };

  Kind kind = Kind::Zero;
  double scale = 1.0;

  // Axial: A = first(x1^2 + x2^2) second(x3) e3.
  // Modulated: A = first(I1) second(I2) base, with (I1, I2) = (x1^2 + x2^2, x3) over the
  // rotation and (rho, theta) over the special field.
  Profile first, second;
  double mu = 1.0;  // HopfBase; Modulated over the special field cr(mu)
  PotentialPtr base;  // Modulated, GaugeShift
  Invariants invariants = Invariants::Rotation;
  Gauge gauge = Gauge::SinX1TimesX2;
  Vector3d gauge_k = Vector3d::Zero();  // Linear gauge g = k.x

  static PotentialSpec zero() { return PotentialSpec{}; }
  static PotentialSpec axial(Profile radial, Profile vertical = Profile::constant(1.0));
  // (mu^2 + |x|^2)^-2 rof
  static PotentialSpec hopf_base(double mu);
  // Invariants follow the parent field of the base; throws InvalidArgument for
  // a base without a parent rotation or special field.
  static PotentialSpec modulated(const PotentialSpec& base, Profile first, Profile second);
  // Potential built from the zero mode; see construct_losyau.
  static PotentialSpec loss_yau();
  static PotentialSpec gauge_shift(const PotentialSpec& base, Gauge g, const Vector3d& k = Vector3d::Zero());
  PotentialSpec scaled(double t) const;
};

// The conformal Killing field that B is parallel to; nullopt for the zero potential.
std::optional<CkfParams> parent_field(const PotentialSpec& spec);
const char* to_string(PotentialSpec::Kind kind);

// Flow invariants (rho, theta) of cr(mu): z = r + i x3, rho = |z - mu| / |z + mu|.
template <class T>
std::pair<T, T> cr_invariants(double mu, const Vec3<T>& x) {
  const T r2 = x[0] * x[0] + x[1] * x[1];
  const T x3 = x[2];
  if (!(primal(r2) > 0.0)) {
    // On the axis rho = 1; the azimuth is undefined and taken as 0.
    return {T(1.0), T(0.0)};
  }
  const T r = sqrt(r2);
  const T num = (r - T(mu)) * (r - T(mu)) + x3 * x3;
  const T den = (r + T(mu)) * (r + T(mu)) + x3 * x3;
  return {sqrt(num / den), atan2(x[1], x[0])};
}

template <class T>
Vec3<T> eval_potential(const PotentialSpec& spec, const Vec3<T>& x);

namespace detail {

// A_j = Re<psi, sigma_j chi> / |psi|^2 with chi = sigma.(-i grad) psi.
template <class T>
Vec3<T> loss_yau_potential(const Vec3<T>& x) {
  const SpinorField mode = SpinorField::loss_yau_mode();
  const SpinorJet<T> jet = spinor_jet([&mode](const auto& y) { return mode(y); }, x);
  Spinor<T> chi;
  for (int k = 0; k < 3; ++k) chi -= times_i(pauli(k, jet.partial[k]));
  const T n2 = norm2(jet.value);
  Vec3<T> a;
  for (int j = 0; j < 3; ++j) {
    const Spinor<T> s = pauli(j, chi);
    a[j] = (jet.value.re.dot(s.re) + jet.value.im.dot(s.im)) / n2;
  }
  return a;
}

template <class T>
Vec3<T> rot_field(const Vec3<T>& x) {
  return Vec3<T>(-x[1], x[0], T(0.0));
}

}  // namespace detail

template <class T>
Vec3<T> eval_potential(const PotentialSpec& spec, const Vec3<T>& x) {
  using K = PotentialSpec::Kind;
  Vec3<T> out = Vec3<T>::Zero();
  switch (spec.kind) {
    case K::Zero:
      break;
    case K::Axial:
      out[2] = spec.first(x[0] * x[0] + x[1] * x[1]) * spec.second(x[2]);
      break;
    case K::HopfBase: {
      const T d = T(spec.mu * spec.mu) + x.squaredNorm();
      out = detail::rot_field(x) / (d * d);
      break;
    }
    case K::Modulated: {
      T f(0.0);
      if (spec.invariants == PotentialSpec::Invariants::Rotation) {
        f = spec.first(x[0] * x[0] + x[1] * x[1]) * spec.second(x[2]);
      } else {
        const auto [rho, theta] = cr_invariants(spec.mu, x);
        f = spec.first(rho) * spec.second(theta);
      }
      out = eval_potential(*spec.base, x) * f;
      break;
    }
    case K::LossYau:
      out = detail::loss_yau_potential(x);
      break;
    case K::GaugeShift: {
      out = eval_potential(*spec.base, x);
      if (spec.gauge == PotentialSpec::Gauge::SinX1TimesX2) {
        out += Vec3<T>(cos(x[0]) * x[1], sin(x[0]), T(0.0));
      } else {
        out += lift<T>(spec.gauge_k);
      }
      break;
    }
  }
  return out * T(spec.scale);
}

// B = curl A. The overall scale is applied after the curl, so scaling a spec
// scales its field exactly.
template <class T>
Vec3<T> eval_field(const PotentialSpec& spec, const Vec3<T>& x) {
  PotentialSpec unit = spec;
  unit.scale = 1.0;
  return curl_of(jacobian([&unit](const auto& y) { return eval_potential(unit, y); }, x)) * T(spec.scale);
}

// div B; zero for every family up to rounding.
double field_divergence(const PotentialSpec& spec, const Vector3d& x);

// |B x X| / max(|B||X|, kParallelFloor) against the parent field; 0 without a parent.
double parallelism_residual(const PotentialSpec& spec, const Vector3d& x);

struct LossYauConstruction {
  PotentialSpec spec;
  SpinorField zeromode;
  int n_points = 0;
  double max_imaginary = 0.0;       // max |Im <psi, sigma_j chi>| / |psi|^2
  double max_dirac_residual = 0.0;  // max |sigma.(-i grad - A) psi|
  double max_parallel_residual = 0.0;
};

// Builds the potential from the zero mode and verifies it at n_points random points of
// [-3, 3]^3 drawn from a fixed seed. Throws ConstructionFailed if a check exceeds tol.
LossYauConstruction construct_losyau(int n_points = 1000, double tol = kLossYauTol);

struct Fw3Result {
  std::vector<double> values;
  double spread = 0.0;
};

// f w^3 at each sample, where B = f X. Throws FrameUndefined where w <= kFrameEps.
Fw3Result fw3_along_curve(const PotentialSpec& spec, const CurveTrace& trace);

}  // namespace ckfz

#endif  // CKFZ_POTENTIAL_HPP_
