#include "ckfz/potential.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "ckfz/error.hpp"

namespace ckfz {

PotentialSpec PotentialSpec::axial(Profile radial, Profile vertical) {
  PotentialSpec s;
  s.kind = Kind::Axial;
  s.first = std::move(radial);
  s.second = std::move(vertical);
  return s;
}

PotentialSpec PotentialSpec::hopf_base(double mu) {
  if (!(mu > 0.0)) throw Error(ErrorKind::InvalidArgument, "hopf_base requires mu > 0");
  PotentialSpec s;
  s.kind = Kind::HopfBase;
  s.mu = mu;
  return s;
}

PotentialSpec PotentialSpec::modulated(const PotentialSpec& base, Profile first, Profile second) {
  const auto parent = parent_field(base);
  if (!parent) throw Error(ErrorKind::InvalidArgument, "modulated potential needs a base with a parent field");
  const CanonicalForm form = classify(*parent);
  const bool at_origin = form.x0.norm() <= kClassifyEps && (form.axis - Vector3d::UnitZ()).norm() <= kClassifyEps;
  PotentialSpec s;
  s.kind = Kind::Modulated;
  s.base = std::make_shared<const PotentialSpec>(base);
  s.first = std::move(first);
  s.second = std::move(second);
  if (form.kind == CkfKind::Rotation && at_origin) {
    s.invariants = Invariants::Rotation;
  } else if (form.kind == CkfKind::Special && form.admissible && at_origin &&
             std::abs(form.scale - 1.0) <= kClassifyEps) {
    s.invariants = Invariants::CrossRing;
    s.mu = form.mu();
  } else {
    throw Error(ErrorKind::InvalidArgument, "no flow invariants for the parent field of this base");
  }
  return s;
}

PotentialSpec PotentialSpec::loss_yau() {
  PotentialSpec s;
  s.kind = Kind::LossYau;
  return s;
}

PotentialSpec PotentialSpec::gauge_shift(const PotentialSpec& base, Gauge g, const Vector3d& k) {
  PotentialSpec s;
  s.kind = Kind::GaugeShift;
  s.base = std::make_shared<const PotentialSpec>(base);
  s.gauge = g;
  s.gauge_k = k;
  return s;
}

PotentialSpec PotentialSpec::scaled(double t) const {
  PotentialSpec s = *this;
  s.scale *= t;
  return s;
}

std::optional<CkfParams> parent_field(const PotentialSpec& spec) {
  using K = PotentialSpec::Kind;
  switch (spec.kind) {
    case K::Zero:
      return std::nullopt;
    case K::Axial:
      return ro_field();
    case K::HopfBase:
      return cr_field(spec.mu);
    case K::Modulated:
    case K::GaugeShift:
      return parent_field(*spec.base);
    case K::LossYau:
      return ro_field() + cr_field(1.0);
  }
  return std::nullopt;
}

const char* to_string(PotentialSpec::Kind kind) {
  using K = PotentialSpec::Kind;
  switch (kind) {
    case K::Zero: return "zero";
    case K::Axial: return "axial";
    case K::HopfBase: return "hopf_base";
    case K::Modulated: return "modulated";
    case K::LossYau: return "loss_yau";
    case K::GaugeShift: return "gauge_shift";
  }
  return "unknown";
}

double field_divergence(const PotentialSpec& spec, const Vector3d& x) {
  const Mat3<double> jac = jacobian(
      [&spec](const auto& y) {
        using S = typename std::decay_t<decltype(y)>::Scalar;
        return eval_field(spec, Vec3<S>(y));
      },
      x);
  return jac.trace();
}

double parallelism_residual(const PotentialSpec& spec, const Vector3d& x) {
  const auto parent = parent_field(spec);
  if (!parent) return 0.0;
  const Vector3d b = eval_field(spec, x);
  const Vector3d X = eval_ckf(*parent, x);
  return b.cross(X).norm() / std::max(b.norm() * X.norm(), kParallelFloor);
}

LossYauConstruction construct_losyau(int n_points, double tol) {
  LossYauConstruction out;
  out.spec = PotentialSpec::loss_yau();
  out.zeromode = SpinorField::loss_yau_mode();
  out.n_points = n_points;

  std::mt19937_64 rng(0x105579a0ULL);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < n_points; ++i) {
    const Vector3d x(u(rng), u(rng), u(rng));
    const SpinorJet<double> jet = spinor_jet([&out](const auto& y) { return out.zeromode(y); }, x);
    Spinor<double> chi;
    for (int k = 0; k < 3; ++k) chi -= times_i(pauli(k, jet.partial[k]));
    const double n2 = norm2(jet.value);
    for (int j = 0; j < 3; ++j) {
      const Spinor<double> s = pauli(j, chi);
      const double im = jet.value.re.dot(s.im) - jet.value.im.dot(s.re);
      out.max_imaginary = std::max(out.max_imaginary, std::abs(im) / n2);
    }
    const Vector3d a = eval_potential(out.spec, x);
    const double dirac = std::sqrt(norm2(chi - pauli_dot(a, jet.value)));
    out.max_dirac_residual = std::max(out.max_dirac_residual, dirac);
    out.max_parallel_residual = std::max(out.max_parallel_residual, parallelism_residual(out.spec, x));
  }

  const auto fail = [](const char* what, double v) {
    throw Error(ErrorKind::ConstructionFailed, std::string(what) + " = " + std::to_string(v));
  };
  if (!(out.max_imaginary <= tol)) fail("imaginary part", out.max_imaginary);
  if (!(out.max_dirac_residual <= tol)) fail("Dirac residual", out.max_dirac_residual);
  if (!(out.max_parallel_residual <= tol)) fail("parallelism residual", out.max_parallel_residual);
  return out;
}

Fw3Result fw3_along_curve(const PotentialSpec& spec, const CurveTrace& trace) {
  Fw3Result out;
  const auto parent = parent_field(spec);
  if (!parent) {
    out.values.assign(trace.samples.size(), 0.0);
    return out;
  }
  out.values.reserve(trace.samples.size());
  for (const CurveSample& s : trace.samples) {
    const Vector3d X = eval_ckf(*parent, s.x);
    const double w = X.norm();
    if (!(w > kFrameEps)) throw Error(ErrorKind::FrameUndefined, "w = " + std::to_string(w) + " on the curve");
    const Vector3d b = eval_field(spec, s.x);
    out.values.push_back(b.dot(X) * w);  // (B.X / w^2) w^3
  }
  if (!out.values.empty()) {
    const auto [lo, hi] = std::minmax_element(out.values.begin(), out.values.end());
    out.spread = *hi - *lo;
  }
  return out;
}

}  // namespace ckfz
