#ifndef CKFZ_FLOWS_HPP_
#define CKFZ_FLOWS_HPP_

#include <optional>

#include "ckfz/ckf.hpp"
#include "ckfz/curve.hpp"
#include "ckfz/potential.hpp"

namespace ckfz {

inline constexpr double kEscapeRadius = 1e6;
// Bisection target for the return time to the section through x0.
inline constexpr double kSectionTol = 1e-10;
inline constexpr int kDefaultResample = 2048;

struct FlowOptions {
  // A closed trace is resampled at this many equally spaced times over one period.
  int n_resample = kDefaultResample;
  long max_steps = 5'000'000;
};

// Distance within which a return to the section counts as closing the orbit:
// max(1e-6, 1e3 rk_tol) (1 + |x0|).
double closure_tolerance(double rk_tol, const Vector3d& x0);

// Integrates x' = X(x) from x0 with an adaptive Dormand-Prince 5(4) pair.
// On the first return through the plane through x0 orthogonal to X(x0) within the
// closure tolerance, the trace is marked closed and holds n_resample samples at
// t_k = k period / n_resample. Otherwise it holds the accepted steps up to t_max.
// Throws NotAdmissible, FrameUndefined (w(x0) <= kFrameEps) and BlowUp (|x| beyond
// kEscapeRadius or step-size collapse).
CurveTrace integrate_curve(const CkfParams& p, const Vector3d& x0, double t_max, double rk_tol,
                           const FlowOptions& options = {});

// Closed-form point of a tagged orbit at time t.
Vector3d analytic_point(const AnalyticTag& tag, double t);

// The cr(mu) orbit with invariant rho in the half-plane at azimuth theta, at time t,
// starting from its outermost point.
Vector3d cr_curve_point(double mu, double rho, double theta, double t);

struct LoopIntegrals {
  double int_div = 0.0;
  double int_absY = 0.0;
  std::optional<double> int_flux;
};

// Periodic trapezoid rule over the resampled closed trace. The flux is the line
// integral of A along the curve. Throws NotClosed.
LoopIntegrals loop_integrals(const CurveTrace& trace, const CkfParams& p,
                             const std::optional<PotentialSpec>& spec = std::nullopt);

struct PlanarityCurvature {
  double max_plane_dev = 0.0;
  double max_curvature_residual = 0.0;
  // Angle between plane_normal and the normal of the least-squares plane.
  double fit_normal_angle = 0.0;
};

// Throws NotClosed.
PlanarityCurvature planarity_and_curvature(const CurveTrace& trace, const CkfParams& p);

}  // namespace ckfz

#endif  // CKFZ_FLOWS_HPP_
