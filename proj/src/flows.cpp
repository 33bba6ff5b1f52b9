#include "ckfz/flows.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include <Eigen/SVD>

#include "ckfz/error.hpp"

namespace ckfz {
namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct Stepper {
  const CkfParams& p;
  double tol;

  Vector3d f(const Vector3d& y) const { return eval_ckf(p, y); }

  // One step of size h; returns the fifth-order solution and sets err to the scaled
  // error norm (accept when err <= 1).
  Vector3d step(const Vector3d& y, double h, double& err) const {
    const Vector3d k1 = f(y);
    const Vector3d k2 = f(y + h * a21 * k1);
    const Vector3d k3 = f(y + h * (a31 * k1 + a32 * k2));
    const Vector3d k4 = f(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vector3d k5 = f(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vector3d k6 = f(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Vector3d out = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Vector3d k7 = f(out);
    const Vector3d e = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    err = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double sc = tol * (1.0 + std::max(std::abs(y[i]), std::abs(out[i])));
      err = std::max(err, std::abs(e[i]) / sc);
    }
    if (!out.allFinite() || !std::isfinite(err)) err = std::numeric_limits<double>::infinity();
    return out;
  }

  static double grow(double h, double err) {
    const double factor = err == 0.0 ? 5.0 : 0.9 * std::pow(err, -0.2);
    return h * std::clamp(factor, 0.2, 5.0);
  }

  void check_escape(const Vector3d& y, double t) const {
    if (!y.allFinite() || y.norm() > kEscapeRadius) {
      throw Error(ErrorKind::BlowUp, "|x| exceeded " + std::to_string(kEscapeRadius) + " at t = " + std::to_string(t));
    }
  }

  void check_step(double h, double t) const {
    if (h < 1e-14 * std::max(1.0, std::abs(t))) {
      throw Error(ErrorKind::BlowUp, "step size collapsed at t = " + std::to_string(t));
    }
  }

  // Advances y from t0 to t1 exactly, carrying the step-size guess h.
  Vector3d advance(Vector3d y, double t0, double t1, double& h) const {
    double t = t0;
    while (t1 - t > 0.0) {
      const bool last = h >= t1 - t;
      const double hs = last ? t1 - t : h;
      double err = 0.0;
      const Vector3d trial = step(y, hs, err);
      if (err <= 1.0) {
        check_escape(trial, t + hs);
        y = trial;
        t = last ? t1 : t + hs;
      }
      const double next = grow(hs, err);
      if (!last || err > 1.0) h = next;
      check_step(h, t);
    }
    return y;
  }
};

std::optional<double> cr_mu(const CkfParams& p) {
  constexpr double eps = 1e-14;
  if (std::abs(p.b0) > eps || p.b.norm() > eps || (p.c - Vector3d::UnitZ()).norm() > eps) return std::nullopt;
  if (p.a.head<2>().norm() > eps || !(p.a[2] > 0.0)) return std::nullopt;
  return std::sqrt(2.0 * p.a[2]);
}

bool is_ro(const CkfParams& p) {
  constexpr double eps = 1e-14;
  return p.a.norm() <= eps && std::abs(p.b0) <= eps && p.c.norm() <= eps && (p.b - Vector3d::UnitZ()).norm() <= eps;
}

std::optional<AnalyticTag> tag_for(const CkfParams& p, const Vector3d& x0) {
  const double r = x0.head<2>().norm();
  if (is_ro(p)) {
    AnalyticTag tag;
    tag.kind = AnalyticTag::Kind::RoCircle;
    tag.rho = r;
    tag.phase = std::atan2(x0[1], x0[0]);
    tag.x3 = x0[2];
    return tag;
  }
  if (const auto mu = cr_mu(p)) {
    AnalyticTag tag;
    tag.mu = *mu;
    if (r <= 1e-14) {
      tag.kind = AnalyticTag::Kind::CrAxis;
      tag.x3 = x0[2];
      return tag;
    }
    const std::complex<double> z(r, x0[2]);
    const std::complex<double> q = (z - *mu) / (z + *mu);
    tag.kind = AnalyticTag::Kind::CrCurve;
    tag.rho = std::abs(q);
    tag.phase = std::arg(q);
    tag.theta = std::atan2(x0[1], x0[0]);
    return tag;
  }
  return std::nullopt;
}

Vector3d fit_normal(const CurveTrace& trace) {
  Eigen::MatrixX3d pts(static_cast<Eigen::Index>(trace.samples.size()), 3);
  for (std::size_t i = 0; i < trace.samples.size(); ++i) pts.row(static_cast<Eigen::Index>(i)) = trace.samples[i].x;
  const Eigen::RowVector3d mean = pts.colwise().mean();
  pts.rowwise() -= mean;
  Eigen::JacobiSVD<Eigen::MatrixX3d> svd(pts, Eigen::ComputeThinV);
  return svd.matrixV().col(2);
}

void require_closed(const CurveTrace& trace) {
  if (!trace.closed || trace.samples.empty() || !(trace.period > 0.0)) {
    throw Error(ErrorKind::NotClosed, "trace is not a closed orbit");
  }
}

}  // namespace

double closure_tolerance(double rk_tol, const Vector3d& x0) {
  return std::max(1e-6, 1e3 * rk_tol) * (1.0 + x0.norm());
}

CurveTrace integrate_curve(const CkfParams& p, const Vector3d& x0, double t_max, double rk_tol,
                           const FlowOptions& options) {
  if (!(rk_tol > 0.0) || !(t_max > 0.0) || options.n_resample < 8) {
    throw Error(ErrorKind::InvalidArgument, "integrate_curve needs rk_tol > 0, t_max > 0, n_resample >= 8");
  }
  CanonicalForm form;
  try {
    form = classify(p);
  } catch (const Error& e) {
    throw Error(ErrorKind::NotAdmissible, e.what());
  }
  if (!form.admissible) throw Error(ErrorKind::NotAdmissible, std::string(to_string(form.kind)) + " field");
  const Vector3d X0 = eval_ckf(p, x0);
  if (!(X0.norm() > kFrameEps)) throw Error(ErrorKind::FrameUndefined, "w(x0) = " + std::to_string(X0.norm()));

  const Stepper rk{p, rk_tol};
  const Vector3d n = X0.normalized();
  const auto g = [&](const Vector3d& y) { return (y - x0).dot(n); };
  const double tol_close = closure_tolerance(rk_tol, x0);

  CurveTrace trace;
  trace.analytic_tag = tag_for(p, x0);
  trace.samples.push_back({0.0, x0});

  double t = 0.0;
  Vector3d y = x0;
  double h = 1e-2 * std::min(1.0, 1.0 / X0.norm());
  for (long steps = 0; t < t_max && steps < options.max_steps; ++steps) {
    const double hs = std::min(h, t_max - t);
    double err = 0.0;
    const Vector3d trial = rk.step(y, hs, err);
    if (err <= 1.0) {
      rk.check_escape(trial, t + hs);
      const double g0 = g(y), g1 = g(trial);
      if (g0 < 0.0 && g1 >= 0.0) {
        // Return through the section in the original direction: bisect on the step length.
        double lo = 0.0, hi = hs;
        for (int it = 0; it < 200; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (mid <= lo || mid >= hi || hi - lo <= kSectionTol * 1e-3 * std::max(1.0, t)) break;
          double e = 0.0;
          (g(rk.step(y, mid, e)) < 0.0 ? lo : hi) = mid;
        }
        const double s = 0.5 * (lo + hi);
        double e = 0.0;
        const Vector3d hit = rk.step(y, s, e);
        if ((hit - x0).norm() <= tol_close) {
          trace.closed = true;
          trace.period = t + s;
          break;
        }
      }
      t += hs;
      y = trial;
      trace.samples.push_back({t, y});
    }
    h = Stepper::grow(hs, err);
    rk.check_step(h, t);
  }

  if (trace.closed) {
    const int n_s = options.n_resample;
    trace.samples.assign(1, {0.0, x0});
    trace.samples.reserve(static_cast<std::size_t>(n_s));
    Vector3d z = x0;
    double hh = 1e-2 * std::min(1.0, 1.0 / X0.norm());
    for (int k = 1; k < n_s; ++k) {
      const double t0 = trace.period * (k - 1) / n_s, t1 = trace.period * k / n_s;
      z = rk.advance(z, t0, t1, hh);
      trace.samples.push_back({t1, z});
    }
    const Vector3d Y0 = curl_ckf(p, x0);
    trace.plane_normal = Y0.norm() > kFrameEps ? Vector3d(Y0.normalized()) : fit_normal(trace);
  }
  return trace;
}

Vector3d cr_curve_point(double mu, double rho, double theta, double t) {
  AnalyticTag tag;
  tag.kind = AnalyticTag::Kind::CrCurve;
  tag.mu = mu;
  tag.rho = rho;
  tag.theta = theta;
  return analytic_point(tag, t);
}

Vector3d analytic_point(const AnalyticTag& tag, double t) {
  switch (tag.kind) {
    case AnalyticTag::Kind::RoCircle:
      return Vector3d(tag.rho * std::cos(t + tag.phase), tag.rho * std::sin(t + tag.phase), tag.x3);
    case AnalyticTag::Kind::CrCurve: {
      const std::complex<double> q = std::polar(tag.rho, tag.phase - tag.mu * t);
      const std::complex<double> z = tag.mu * (1.0 + q) / (1.0 - q);
      return Vector3d(z.real() * std::cos(tag.theta), z.real() * std::sin(tag.theta), z.imag());
    }
    case AnalyticTag::Kind::CrAxis:
      return Vector3d(0, 0, tag.mu * std::tan(0.5 * tag.mu * t + std::atan(tag.x3 / tag.mu)));
  }
  return Vector3d::Zero();
}

LoopIntegrals loop_integrals(const CurveTrace& trace, const CkfParams& p, const std::optional<PotentialSpec>& spec) {
  require_closed(trace);
  const double dt = trace.period / static_cast<double>(trace.samples.size());
  LoopIntegrals out;
  double flux = 0.0;
  for (const CurveSample& s : trace.samples) {
    out.int_div += div_ckf(p, s.x);
    out.int_absY += curl_ckf(p, s.x).norm();
    if (spec) flux += eval_potential(*spec, s.x).dot(eval_ckf(p, s.x));
  }
  out.int_div *= dt;
  out.int_absY *= dt;
  if (spec) out.int_flux = flux * dt;
  return out;
}

PlanarityCurvature planarity_and_curvature(const CurveTrace& trace, const CkfParams& p) {
  require_closed(trace);
  PlanarityCurvature out;
  const Vector3d& x0 = trace.samples.front().x;
  for (const CurveSample& s : trace.samples) {
    out.max_plane_dev = std::max(out.max_plane_dev, std::abs((s.x - x0).dot(trace.plane_normal)));
    // gamma' = X, gamma'' = (X . grad) X
    const Vector3d X = eval_ckf(p, s.x);
    const Mat3<double> jac = jacobian([&p](const auto& y) { return eval_ckf(p, y); }, s.x);
    const Vector3d acc = jac.transpose() * X;
    const double w = X.norm();
    if (!(w > kFrameEps)) throw Error(ErrorKind::FrameUndefined, "w vanishes on the trace");
    const double kappa = X.cross(acc).norm() / (w * w * w);
    const double predicted = 0.5 * curl_ckf(p, s.x).norm() / w;
    out.max_curvature_residual = std::max(out.max_curvature_residual, std::abs(kappa - predicted));
  }
  const Vector3d nf = fit_normal(trace);
  out.fit_normal_angle = std::atan2(nf.cross(trace.plane_normal).norm(), std::abs(nf.dot(trace.plane_normal)));
  return out;
}

}  // namespace ckfz
