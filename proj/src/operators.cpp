#include "ckfz/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "ckfz/error.hpp"
#include "ckfz/quadrature.hpp"

namespace ckfz {
namespace {

auto as_callable(const SpinorField& f) {
  return [&f](const auto& y) { return f(y); };
}

void require_frame(const CkfParams& p, const Vector3d& x) {
  const double w = eval_ckf(p, x).norm();
  if (!(w > kFrameEps)) throw Error(ErrorKind::FrameUndefined, "w = " + std::to_string(w));
}

void require_parallel(const CkfParams& p, const PotentialSpec& spec, const Vector3d& x) {
  const double r = parallelism_against(p, spec, x);
  if (r > kParallelTol) throw Error(ErrorKind::NotParallel, "|B x X| / (|B||X|) = " + std::to_string(r));
}

double norm(const Spinor<double>& s) { return std::sqrt(norm2(s)); }

}  // namespace

double parallelism_against(const CkfParams& p, const PotentialSpec& spec, const Vector3d& x) {
  const Vector3d b = eval_field(spec, x);
  const Vector3d X = eval_ckf(p, x);
  return b.cross(X).norm() / std::max(b.norm() * X.norm(), kParallelFloor);
}

Spinor2 apply_D(const PotentialSpec& spec, const SpinorField& f, const Vector3d& x) {
  return to_complex(ops::dirac(spec, as_callable(f), x));
}

Spinor2 apply_Q(const CkfParams& p, const PotentialSpec& spec, const SpinorField& f, const Vector3d& x) {
  require_parallel(p, spec, x);
  return to_complex(ops::q_op(p, spec, as_callable(f), x));
}

Spinor2 apply_S(const CkfParams& p, const SpinorField& f, const Vector3d& x) {
  require_frame(p, x);
  return to_complex(ops::s_op(p, as_callable(f), x));
}

Spinor2 apply_projection(const CkfParams& p, int sign, const SpinorField& f, const Vector3d& x) {
  require_frame(p, x);
  return to_complex(ops::proj_op(p, sign, as_callable(f), x));
}

CommutatorResiduals commutator_residuals(const CkfParams& p, const PotentialSpec& spec, const SpinorField& f,
                                         const Vector3d& x) {
  require_frame(p, x);
  require_parallel(p, spec, x);
  const auto phi = as_callable(f);
  const auto q_phi = [&](const auto& y) { return ops::q_op(p, spec, phi, y); };
  const auto s_phi = [&](const auto& y) { return ops::s_op(p, phi, y); };
  const auto dw_phi = [&](const auto& y) { return ops::dirac_w(p, spec, phi, y); };

  const Spinor<double> dwq = ops::dirac_w(p, spec, q_phi, x);
  const Spinor<double> qdw = ops::q_op(p, spec, dw_phi, x);
  const Spinor<double> qs = ops::q_op(p, spec, s_phi, x);
  const Spinor<double> sq = ops::s_op(p, q_phi, x);
  const Spinor<double> dws = ops::dirac_w(p, spec, s_phi, x);
  const Spinor<double> sdw = ops::s_op(p, dw_phi, x);
  const Spinor<double> q = q_phi(x);
  const Spinor<double> s = s_phi(x);

  const Vector3d X = eval_ckf(p, x);
  const double xy_over_w = X.dot(curl_ckf(p, x)) / X.norm();

  CommutatorResiduals out;
  out.r1 = norm(dwq - qdw);
  out.r2 = norm(qs - sq);
  out.r3 = norm(dws + sdw - 2.0 * q - (0.5 * xy_over_w) * s);
  out.scale = std::max({norm(dwq), norm(qdw), norm(qs), norm(dws)});
  return out;
}

namespace {

struct Partial {
  double lhs = 0, tp = 0, tm = 0, q = 0, max_f = 0;
  double min_w = std::numeric_limits<double>::infinity();
  long support = 0;
};

// Per-node integrands with the spinor jet taken once and the multiplier derivatives in closed form.
struct NodeKernel {
  const CkfParams& p;
  const PotentialSpec& spec;
  const SpinorField& f;

  // D(M phi) = -i sigma_k (d_k M phi + M d_k phi) - sigma.A M phi
  static Spinor2 dirac_of(const Matrix2c& m, const std::array<Matrix2c, 3>& dm, const Spinor2& v,
                          const std::array<Spinor2, 3>& dv, const Matrix2c& sa) {
    const std::complex<double> mi(0.0, -1.0);
    Spinor2 out = -(sa * (m * v));
    for (int k = 0; k < 3; ++k) out += mi * (pauli_matrix(k) * (dm[k] * v + m * dv[k]));
    return out;
  }

  void accumulate(const Vector3d& x, double weight, Partial& acc) const {
    const SpinorJet<double> jet = spinor_jet([this](const auto& y) { return f(y); }, x);
    const Spinor2 v = to_complex(jet.value);
    const double fv = v.norm();
    if (fv == 0.0) {
      bool all_zero = true;
      for (int k = 0; k < 3; ++k) all_zero = all_zero && to_complex(jet.partial[k]).norm() == 0.0;
      if (all_zero) return;
    }
    std::array<Spinor2, 3> dv;
    for (int k = 0; k < 3; ++k) dv[k] = to_complex(jet.partial[k]);

    const Vector3d X = eval_ckf(p, x);
    const double w = X.norm();
    acc.support += 1;
    acc.max_f = std::max(acc.max_f, fv);
    acc.min_w = std::min(acc.min_w, w);
    if (!(w > kSupportMinW)) return;  // reported as a support violation by the caller

    const Mat3<double> jac = jacobian([this](const auto& y) { return eval_ckf(p, y); }, x);
    const Vector3d grad_w = jac * X / w;
    const Vector3d A = eval_potential(spec, x);
    const Matrix2c sa = sigma_dot(A);
    const Matrix2c sx = sigma_dot(X);
    const Matrix2c id = Matrix2c::Identity();

    // M = w I
    std::array<Matrix2c, 3> dw;
    for (int k = 0; k < 3; ++k) dw[k] = grad_w[k] * id;
    const Spinor2 dwphi = dirac_of(w * id, dw, v, dv, sa);

    // M = w P-+ = (w I -+ sigma.X) / 2
    const auto half_proj = [&](double sign) {
      std::array<Matrix2c, 3> dm;
      for (int k = 0; k < 3; ++k) dm[k] = 0.5 * (grad_w[k] * id + sign * sigma_dot(jac.row(k).transpose()));
      return dirac_of(0.5 * (w * id + sign * sx), dm, v, dv, sa);
    };
    const Matrix2c p_plus = 0.5 * (id + sx / w);
    const Matrix2c p_minus = 0.5 * (id - sx / w);
    const Spinor2 t_plus = p_plus * half_proj(-1.0);
    const Spinor2 t_minus = p_minus * half_proj(+1.0);

    Spinor2 grad = Spinor2::Zero();
    for (int k = 0; k < 3; ++k) grad += X[k] * dv[k];
    const std::complex<double> i(0.0, 1.0);
    const Spinor2 q = -i * grad - X.dot(A) * v + 0.25 * (sigma_dot(curl_ckf(p, x)) * v) -
                      (2.0 / 3.0) * i * div_ckf(p, x) * v;

    const double ww = weight * w;
    acc.lhs += ww * dwphi.squaredNorm();
    acc.tp += ww * t_plus.squaredNorm();
    acc.tm += ww * t_minus.squaredNorm();
    acc.q += ww * q.squaredNorm();
  }
};

}  // namespace

NormDecomposition norm_decomposition_check(const CkfParams& p, const PotentialSpec& spec, const SpinorField& f,
                                           const QuadratureSpec& grid) {
  const double mag = p.magnitude();
  if (simple_rotation_residual(p).max_abs() > kClassifyEps * mag * mag) {
    throw Error(ErrorKind::NotSimpleRotation, "norm decomposition needs X . curl X = 0");
  }
  std::pair<Vector3d, Vector3d> box;
  if (grid.box) {
    box = *grid.box;
  } else if (f.compact()) {
    box = f.support_box();
  } else {
    throw Error(ErrorKind::SupportViolation, "spinor field is not compactly supported and no box was given");
  }
  const Rule1d rx = composite_gauss_legendre(box.first[0], box.second[0], grid.panels, grid.order);
  const Rule1d ry = composite_gauss_legendre(box.first[1], box.second[1], grid.panels, grid.order);
  const Rule1d rz = composite_gauss_legendre(box.first[2], box.second[2], grid.panels, grid.order);
  const int n = grid.nodes_per_axis();

  // One partial per x-slab, summed in slab order: the result does not depend on the thread count.
  std::vector<Partial> slabs(static_cast<std::size_t>(n));
  const NodeKernel kernel{p, spec, f};
  const auto work = [&](int first, int stride) {
    for (int i = first; i < n; i += stride) {
      Partial& acc = slabs[static_cast<std::size_t>(i)];
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j),
                     uk = static_cast<std::size_t>(k);
          const Vector3d x(rx.nodes[ui], ry.nodes[uj], rz.nodes[uk]);
          kernel.accumulate(x, rx.weights[ui] * ry.weights[uj] * rz.weights[uk], acc);
        }
      }
    }
  };
  const int threads = std::max(1, std::min(grid.threads, n));
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    for (auto& th : pool) th.join();
  }

  NormDecomposition out;
  out.nodes_per_axis = n;
  out.min_w_on_support = std::numeric_limits<double>::infinity();
  double max_f = 0;
  for (const Partial& s : slabs) {
    out.lhs += s.lhs;
    out.t_plus += s.tp;
    out.t_minus += s.tm;
    out.q += s.q;
    out.support_nodes += s.support;
    out.min_w_on_support = std::min(out.min_w_on_support, s.min_w);
    max_f = std::max(max_f, s.max_f);
  }
  if (out.support_nodes == 0 || max_f == 0.0) {
    throw Error(ErrorKind::SupportViolation, "spinor field vanishes on every quadrature node");
  }
  if (!(out.min_w_on_support > kSupportMinW)) {
    throw Error(ErrorKind::SupportViolation, "spinor field is nonzero where w = " + std::to_string(out.min_w_on_support));
  }
  // The zero set of X itself, sampled densely.
  const FixedPointCensus census = fixed_point_census(p);
  std::vector<Vector3d> zeros;
  for (const FixedPoint& z : census.isolated) zeros.push_back(z.point);
  const double reach = (box.second - box.first).norm() + (census.locus_center - box.first).norm();
  constexpr int kLocusSamples = 4096;
  for (int i = 0; i <= kLocusSamples; ++i) {
    const double s = static_cast<double>(i) / kLocusSamples;
    if (census.locus == FixedPointCensus::Locus::Line) {
      zeros.push_back(census.locus_center + (2.0 * s - 1.0) * reach * census.locus_axis);
    } else if (census.locus == FixedPointCensus::Locus::Circle) {
      const Vector3d u = census.locus_axis.unitOrthogonal();
      const Vector3d v = census.locus_axis.cross(u);
      const double a = 2.0 * std::numbers::pi * s;
      zeros.push_back(census.locus_center + census.locus_radius * (std::cos(a) * u + std::sin(a) * v));
    }
  }
  for (const Vector3d& z : zeros) {
    if (to_complex(f(z)).norm() > 1e-12 * max_f) {
      throw Error(ErrorKind::SupportViolation, "spinor field is nonzero on the zero set of X");
    }
  }

  // Faces of the box, sampled on a 65 x 65 lattice each.
  double face_max = 0;
  constexpr int m = 65;
  for (int axis = 0; axis < 3; ++axis) {
    for (int side = 0; side < 2; ++side) {
      for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) {
          Vector3d x;
          const int u = (axis + 1) % 3, v = (axis + 2) % 3;
          x[axis] = side == 0 ? box.first[axis] : box.second[axis];
          x[u] = box.first[u] + (box.second[u] - box.first[u]) * a / (m - 1);
          x[v] = box.first[v] + (box.second[v] - box.first[v]) * b / (m - 1);
          face_max = std::max(face_max, to_complex(f(x)).norm());
        }
      }
    }
  }
  if (face_max > 1e-12 * max_f) {
    throw Error(ErrorKind::SupportViolation, "spinor field is non-negligible on the box boundary");
  }

  const double rhs = out.t_plus + out.t_minus + out.q;
  out.rel_err = std::abs(out.lhs - rhs) / out.lhs;
  return out;
}

namespace {

constexpr double kE = std::numbers::e;

double bump01(double s) { return (s <= 0.0 || s >= 1.0) ? 0.0 : std::exp(-1.0 / (s * (1.0 - s))); }

double bump_integral(double t) {
  if (t <= 0.0) return 0.0;
  t = std::min(t, 1.0);
  static const Rule1d rule = gauss_legendre(24);
  constexpr int panels = 8;
  double sum = 0.0;
  const double h = t / panels;
  for (int k = 0; k < panels; ++k) {
    const double mid = (k + 0.5) * h;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * bump01(mid + 0.5 * h * rule.nodes[i]);
  }
  return 0.5 * h * sum;
}

double bump_total() {
  static const double total = bump_integral(1.0);
  return total;
}

}  // namespace

double chi0(double t) {
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return 0.0;
  // The bump is symmetric about 1/2; integrate over the shorter side.
  if (t > 0.5) return bump_integral(1.0 - t) / bump_total();
  return 1.0 - bump_integral(t) / bump_total();
}

double chi0_prime(double t) { return -bump01(t) / bump_total(); }

double chi0_prime_sup() { return bump01(0.5) / bump_total(); }

double chi_outer(double R, const Vector3d& x) {
  const double r = x.norm();
  if (r <= 1.0) return 1.0;
  return chi0(std::log(std::log(r)) - std::log(std::log(R)));
}

Vector3d grad_chi_outer(double R, const Vector3d& x) {
  const double r = x.norm();
  if (r <= 1.0) return Vector3d::Zero();
  const double lr = std::log(r);
  return x / (r * r * lr) * chi0_prime(std::log(lr) - std::log(std::log(R)));
}

double eta_inner(const CkfParams& p, double eps, const Vector3d& x) {
  const double w = eval_ckf(p, x).norm();
  if (w == 0.0) return 0.0;
  const double inv = 1.0 / w;
  if (inv <= 1.0) return 1.0;
  return chi0(std::log(std::log(inv)) - std::log(std::log(1.0 / eps)));
}

double growth_constant(const CkfParams& p) {
  // w <= |a| + (|b0| + |b|)|x| + (3/2)|c||x|^2 <= M (1 + |x|)^2
  const double m = std::max({p.a.norm(), 0.5 * (std::abs(p.b0) + p.b.norm()), 1.5 * p.c.norm()});
  return std::sqrt(m);
}

CutoffBound cutoff_bound_check(const CkfParams& p, const CutoffPair& c, const CutoffSampling& s) {
  if (!(c.R > kE)) throw Error(ErrorKind::InvalidArgument, "cutoff check needs R > e");
  if (s.n_radial < 1 || s.n_directions < 1) throw Error(ErrorKind::InvalidArgument, "empty sampling");
  CutoffBound out;
  out.constant_c = growth_constant(p);
  const double log_r = std::log(c.R);
  out.bound = 2.0 * out.constant_c * chi0_prime_sup() / log_r;

  // Fibonacci lattice on the unit sphere, including both poles.
  std::vector<Vector3d> dirs;
  dirs.reserve(static_cast<std::size_t>(s.n_directions));
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < s.n_directions; ++k) {
    const double z = s.n_directions == 1 ? 1.0 : 1.0 - 2.0 * k / (s.n_directions - 1.0);
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    dirs.emplace_back(rho * std::cos(golden * k), rho * std::sin(golden * k), z);
  }
  // |x| = R^{e^t}, t in [0, 1], covers the support of grad chi_R.
  for (int j = 0; j <= s.n_radial; ++j) {
    const double t = static_cast<double>(j) / s.n_radial;
    const double lr = log_r * std::exp(t);
    const double r = std::exp(lr);
    const double g = std::abs(chi0_prime(t)) / (r * lr);
    if (g == 0.0) continue;
    for (const Vector3d& d : dirs) {
      const double w = eval_ckf(p, Vector3d(r * d)).norm();
      out.sup_outer = std::max(out.sup_outer, std::sqrt(w) * g);
    }
  }
  return out;
}

}  // namespace ckfz
