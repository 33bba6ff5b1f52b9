#ifndef CKFZ_HOLONOMY_HPP_
#define CKFZ_HOLONOMY_HPP_

// Transport of Q-eigenspinors around a closed orbit of an admissible field.
//
// Along the orbit, Q (u e) = lambda u e with e a unit section of ran P+- reduces to
//
//   du/dt = -i (|Y|/4 - (2/3) i div X - X.A - lambda) u,
//
// so u(tau)/u(0) = exp(-i (P - lambda tau)) with P the loop integral of the bracket.

#include <complex>
#include <utility>

#include "ckfz/ckf.hpp"
#include "ckfz/curve.hpp"
#include "ckfz/potential.hpp"
#include "ckfz/spinor.hpp"

namespace ckfz {

using Complex = std::complex<double>;

struct LambdaProgression {
  double offset = 0.0;  // representative in [0, step)
  double step = 0.0;    // 2 pi / tau
};

struct HolonomyResult {
  CurveTrace curve;
  Complex phase_integral;
  LambdaProgression admissible_lambdas;
  Complex monodromy_at_zero;
  // Distance from offset to the nearest point of (2Z + 1) pi / tau.
  double quantization_residual = 0.0;
};

// The closed loop integral P of |Y|/4 - (2/3) i div X - X.A. Throws NotClosed.
Complex phase_integral(const CkfParams& p, const PotentialSpec& spec, const CurveTrace& trace);

// u(tau)/u(0) for the transport equation at lambda. Throws NotClosed and
// FrameUndefined (w or |Y| vanishing on the trace).
Complex transport(const CkfParams& p, const PotentialSpec& spec, const CurveTrace& trace, double lambda);

HolonomyResult admissible_spectrum(const CkfParams& p, const PotentialSpec& spec, const CurveTrace& trace);

// e0 with sigma.N e0 = e0, |e0|^2 = 2 and N = Y/|Y|.
Spinor2 frame_base_spinor(const Vector3d& normal);

// (P+ e0, P- e0) at x. Throws FrameUndefined.
std::pair<Spinor2, Spinor2> frame_spinor(const CkfParams& p, const Vector3d& x);

struct SectorMonodromy {
  Complex plus, minus;
  // Largest |P-+ Q e+-| along the trace: Q must keep each sector.
  double leakage = 0.0;
};

// Monodromy of each sector computed directly from <e+-, Q e+-> along the trace, with
// e0 fixed from the trace's plane normal. Throws NotClosed, FrameUndefined.
SectorMonodromy sector_monodromy(const CkfParams& p, const PotentialSpec& spec, const CurveTrace& trace,
                                 double lambda);

}  // namespace ckfz

#endif  // CKFZ_HOLONOMY_HPP_
