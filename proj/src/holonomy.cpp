#include "ckfz/holonomy.hpp"

#include <cmath>
#include <numbers>

#include "ckfz/error.hpp"
#include "ckfz/flows.hpp"
#include "ckfz/operators.hpp"

namespace ckfz {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_closed(const CurveTrace& trace) {
  if (!trace.closed || trace.samples.empty() || !(trace.period > 0.0)) {
    throw Error(ErrorKind::NotClosed, "trace is not a closed orbit");
  }
}

void require_frame(const CkfParams& p, const CurveTrace& trace) {
  for (const CurveSample& s : trace.samples) {
    const FieldFrame f = field_data_at(p, s.x);
    if (!(f.w > kFrameEps) || !(f.Y.norm() > kFrameEps)) {
      throw Error(ErrorKind::FrameUndefined, "w or |Y| vanishes on the trace");
    }
  }
}

// Normal of the orbit plane oriented along Y.
Vector3d oriented_normal(const CkfParams& p, const CurveTrace& trace) {
  const Vector3d Y = curl_ckf(p, trace.samples.front().x);
  return trace.plane_normal.dot(Y) < 0.0 ? Vector3d(-trace.plane_normal) : trace.plane_normal;
}

Complex inner(const Spinor2& a, const Spinor2& b) { return a.dot(b); }

}  // namespace

Complex phase_integral(const CkfParams& p, const PotentialSpec& spec, const CurveTrace& trace) {
  require_closed(trace);
  const LoopIntegrals li = loop_integrals(trace, p, spec);
  return Complex(0.25 * li.int_absY - *li.int_flux, -2.0 / 3.0 * li.int_div);
}

Complex transport(const CkfParams& p, const PotentialSpec& spec, const CurveTrace& trace, double lambda) {
  require_closed(trace);
  require_frame(p, trace);
  const Complex P = phase_integral(p, spec, trace);
  return std::exp(Complex(0.0, -1.0) * (P - lambda * trace.period));
}

HolonomyResult admissible_spectrum(const CkfParams& p, const PotentialSpec& spec, const CurveTrace& trace) {
  require_closed(trace);
  require_frame(p, trace);
  HolonomyResult out;
  out.curve = trace;
  out.phase_integral = phase_integral(p, spec, trace);
  const double tau = trace.period;
  const double step = kTwoPi / tau;
  // exp(-i (P - lambda tau)) = 1  <=>  lambda = Re P / tau mod 2 pi / tau
  double offset = std::fmod(out.phase_integral.real() / tau, step);
  if (offset < 0.0) offset += step;
  out.admissible_lambdas = {offset, step};
  out.monodromy_at_zero = std::exp(Complex(0.0, -1.0) * out.phase_integral);
  // (2Z + 1) pi / tau sits at step / 2 modulo step.
  out.quantization_residual = std::abs(offset - 0.5 * step);
  return out;
}

Spinor2 frame_base_spinor(const Vector3d& n) {
  // +1 eigenvector of sigma.n, normalised to |e0|^2 = 2.
  Spinor2 v;
  if (n.z() > -0.5) {
    v << Complex(1.0 + n.z(), 0.0), Complex(n.x(), n.y());
  } else {
    v << Complex(n.x(), -n.y()), Complex(1.0 - n.z(), 0.0);
  }
  return std::sqrt(2.0) * v / v.norm();
}

std::pair<Spinor2, Spinor2> frame_spinor(const CkfParams& p, const Vector3d& x) {
  const FieldFrame f = frame_at(p, x);
  const Spinor2 e0 = frame_base_spinor(*f.B);
  const Spinor2 se0 = sigma_dot(*f.T) * e0;
  return {0.5 * (e0 + se0), 0.5 * (e0 - se0)};
}

SectorMonodromy sector_monodromy(const CkfParams& p, const PotentialSpec& spec, const CurveTrace& trace,
                                 double lambda) {
  require_closed(trace);
  require_frame(p, trace);
  const Spinor2 e0 = frame_base_spinor(oriented_normal(p, trace));
  SectorMonodromy out;
  Complex integral[2];
  for (int k = 0; k < 2; ++k) {
    const double sign = k == 0 ? 1.0 : -1.0;
    // e(y) = (e0 + sign S(y) e0) / 2 along the whole neighbourhood of the orbit.
    auto e = [&](const auto& y) {
      using S = typename std::decay_t<decltype(y)>::Scalar;
      const Spinor<S> base = Spinor<S>::from(e0);
      const Vec3<S> X = eval_ckf(p, y);
      const Spinor<S> sx = (S(1.0) / sqrt(X.squaredNorm())) * pauli_dot(X, base);
      return S(0.5) * (base + S(sign) * sx);
    };
    Complex sum = 0.0;
    for (const CurveSample& s : trace.samples) {
      const Spinor2 ev = primal_spinor(e(s.x));
      const Spinor2 qe = to_complex(ops::q_op(p, spec, e, s.x));
      const Complex c = inner(ev, qe) / ev.squaredNorm();
      sum += c;
      out.leakage = std::max(out.leakage, (qe - c * ev).norm());
    }
    integral[k] = sum * (trace.period / static_cast<double>(trace.samples.size()));
  }
  out.plus = std::exp(Complex(0.0, -1.0) * (integral[0] - lambda * trace.period));
  out.minus = std::exp(Complex(0.0, -1.0) * (integral[1] - lambda * trace.period));
  return out;
}

}  // namespace ckfz
