#include "ckfz/identities.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "ckfz/error.hpp"

namespace ckfz {
namespace {

// Pointwise differential data of X, all by (nested) automatic differentiation.
struct Derivatives {
  Vector3d X;
  double w = 0.0;
  Mat3<double> J;   // J(i, j) = d_i X_j
  double div = 0.0;
  Vector3d Y;
  Mat3<double> dY;  // dY(i, j) = d_i Y_j
  Vector3d lapX;
  Vector3d grad_div;
  Vector3d grad_w2;
  Vector3d grad_XdotY;

  // (V . grad) X and (V . grad) Y
  Vector3d along_X(const Vector3d& v) const { return J.transpose() * v; }
  Vector3d along_Y(const Vector3d& v) const { return dY.transpose() * v; }
};

Derivatives derivatives(const CkfParams& p, const Vector3d& x) {
  const auto field = [&p](const auto& y) { return eval_ckf(p, y); };
  const auto curl = [&](const auto& y) {
    using S = typename std::decay_t<decltype(y)>::Scalar;
    return curl_of(jacobian(field, Vec3<S>(y)));
  };
  Derivatives d;
  d.X = eval_ckf(p, x);
  d.w = d.X.norm();
  d.J = jacobian(field, x);
  d.div = d.J.trace();
  d.Y = curl_of(d.J);
  d.dY = jacobian(curl, x);
  for (int j = 0; j < 3; ++j) {
    const auto column = [&, j](const auto& y) {
      using S = typename std::decay_t<decltype(y)>::Scalar;
      return Vec3<S>(jacobian(field, Vec3<S>(y)).col(j));
    };
    d.lapX[j] = jacobian(column, x).trace();
  }
  d.grad_div = gradient(
      [&](const auto& y) {
        using S = typename std::decay_t<decltype(y)>::Scalar;
        return jacobian(field, Vec3<S>(y)).trace();
      },
      x);
  d.grad_w2 = gradient([&](const auto& y) { return field(y).squaredNorm(); }, x);
  d.grad_XdotY = gradient([&](const auto& y) { return field(y).dot(curl(y)); }, x);
  return d;
}

double maxnorm(const Vector3d& v) { return v.cwiseAbs().maxCoeff(); }

void require_w(const Derivatives& d) {
  if (d.w <= kFrameEps) throw Error(ErrorKind::FrameUndefined, "w <= eps");
}

using Check = std::function<double(const CkfParams&, const Vector3d&, const Derivatives&)>;

struct Entry {
  IdentityInfo info;
  Check check;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = [] {
    std::vector<Entry> t;
    const auto add = [&t](std::string id, std::string formula, IdentityScope scope, Check c) {
      t.push_back({{std::move(id), std::move(formula), scope}, std::move(c)});
    };
    using enum IdentityScope;

    add("conformal_killing", "d_i X_j + d_j X_i = (2/3)(div X) delta_ij", General,
        [](const CkfParams&, const Vector3d&, const Derivatives& d) {
          const Mat3<double> r = d.J + d.J.transpose() - (2.0 / 3.0) * d.div * Mat3<double>::Identity();
          return r.cwiseAbs().maxCoeff();
        });
    add("XDw_alpha", "grad_X w^alpha = (alpha/3)(div X) w^alpha, alpha in {-1, 1/2, 3}", General,
        [](const CkfParams& p, const Vector3d& x, const Derivatives& d) {
          require_w(d);
          double r = 0.0;
          for (const double alpha : {-1.0, 0.5, 3.0}) {
            const Vector3d g = gradient(
                [&](const auto& y) { return pow(eval_ckf(p, y).squaredNorm(), 0.5 * alpha); }, x);
            r = std::max(r, std::abs(d.X.dot(g) - alpha / 3.0 * d.div * std::pow(d.w, alpha)));
          }
          return r;
        });
    add("XDX_grad_w2", "grad_X X = -(1/2) grad w^2 + (2/3)(div X) X", General,
        [](const CkfParams&, const Vector3d&, const Derivatives& d) {
          return maxnorm(d.along_X(d.X) - (-0.5 * d.grad_w2 + 2.0 / 3.0 * d.div * d.X));
        });
    add("XxXxY", "X x (X x Y) = (X.Y) X - w^2 Y", General,
        [](const CkfParams&, const Vector3d&, const Derivatives& d) {
          return maxnorm(d.X.cross(d.X.cross(d.Y)) - (d.X.dot(d.Y) * d.X - d.w * d.w * d.Y));
        });
    add("XxY", "X x Y = -2 grad_X X + (2/3)(div X) X", General,
        [](const CkfParams&, const Vector3d&, const Derivatives& d) {
          return maxnorm(d.X.cross(d.Y) - (-2.0 * d.along_X(d.X) + 2.0 / 3.0 * d.div * d.X));
        });
    add("Xxgrad_w", "(X x grad) w = (1/2) w^-1 (X.Y) X - (1/2) w Y", General,
        [](const CkfParams& p, const Vector3d& x, const Derivatives& d) {
          require_w(d);
          const Vector3d gw = gradient([&](const auto& y) { return sqrt(eval_ckf(p, y).squaredNorm()); }, x);
          return maxnorm(d.X.cross(gw) - (0.5 / d.w * d.X.dot(d.Y) * d.X - 0.5 * d.w * d.Y));
        });
    add("XDX_frame", "grad_X X = (1/3)(div X) X - (1/2) X x Y", General,
        [](const CkfParams&, const Vector3d&, const Derivatives& d) {
          return maxnorm(d.along_X(d.X) - (d.div / 3.0 * d.X - 0.5 * d.X.cross(d.Y)));
        });
    add("grad_w2", "grad w^2 = (2/3)(div X) X + X x Y", General,
        [](const CkfParams&, const Vector3d&, const Derivatives& d) {
          return maxnorm(d.grad_w2 - (2.0 / 3.0 * d.div * d.X + d.X.cross(d.Y)));
        });
    add("killing_Y", "d_i Y_j + d_j Y_i = 0", General,
        [](const CkfParams&, const Vector3d&, const Derivatives& d) {
          return (d.dY + d.dY.transpose()).cwiseAbs().maxCoeff();
        });
    add("div_Y", "div Y = 0", General,
        [](const CkfParams&, const Vector3d&, const Derivatives& d) { return std::abs(d.dY.trace()); });
    add("YDX", "grad_Y X = Y_i grad X_i = (1/3)(div X) Y", General,
        [](const CkfParams&, const Vector3d&, const Derivatives& d) {
          return std::max(maxnorm(d.along_X(d.Y) - d.div / 3.0 * d.Y), maxnorm(d.along_X(d.Y) - d.J * d.Y));
        });
    add("grad_XdotY", "grad (X.Y) = grad_Y X - grad_X Y", General,
        [](const CkfParams&, const Vector3d&, const Derivatives& d) {
          return maxnorm(d.grad_XdotY - (d.along_X(d.Y) - d.along_Y(d.X)));
        });
    add("XDY", "grad_X Y = (1/3)(div X) Y - grad (X.Y)", General,
        [](const CkfParams&, const Vector3d&, const Derivatives& d) {
          return maxnorm(d.along_Y(d.X) - (d.div / 3.0 * d.Y - d.grad_XdotY));
        });
    add("laplacian_X", "Lap X_j = -(1/3) d_j (div X)", General,
        [](const CkfParams&, const Vector3d&, const Derivatives& d) {
          return maxnorm(d.lapX + d.grad_div / 3.0);
        });
    add("XDY_laplacian", "grad_X Y = 2 X x Lap X", General,
        [](const CkfParams&, const Vector3d&, const Derivatives& d) {
          return maxnorm(d.along_Y(d.X) - 2.0 * d.X.cross(d.lapX));
        });
    add("XxYDY", "grad_{X x Y} Y = 2 (X.Lap X) Y - 2 (Y.Lap X) X", General,
        [](const CkfParams&, const Vector3d&, const Derivatives& d) {
          const Vector3d z = d.X.cross(d.Y);
          return maxnorm(d.along_Y(z) - (2.0 * d.X.dot(d.lapX) * d.Y - 2.0 * d.Y.dot(d.lapX) * d.X));
        });

    add("XdotY_zero", "X . Y = 0", SimpleRotation,
        [](const CkfParams&, const Vector3d&, const Derivatives& d) { return std::abs(d.X.dot(d.Y)); });
    add("XxY_norm", "|X x Y| = w |Y| and X x (X x Y) = -w^2 Y", SimpleRotation,
        [](const CkfParams&, const Vector3d&, const Derivatives& d) {
          const Vector3d z = d.X.cross(d.Y);
          return std::max(std::abs(z.norm() - d.w * d.Y.norm()), maxnorm(d.X.cross(z) + d.w * d.w * d.Y));
        });
    add("grad_w_norm_simple", "|grad w|^2 = (1/9)(div X)^2 + (1/4)|Y|^2", SimpleRotation,
        [](const CkfParams& p, const Vector3d& x, const Derivatives& d) {
          require_w(d);
          const Vector3d gw = gradient([&](const auto& y) { return sqrt(eval_ckf(p, y).squaredNorm()); }, x);
          return std::abs(gw.squaredNorm() - (d.div * d.div / 9.0 + 0.25 * d.Y.squaredNorm()));
        });
    add("YdotLaplacianX_zero", "Y . Lap X = 0", SimpleRotation,
        [](const CkfParams&, const Vector3d&, const Derivatives& d) { return std::abs(d.Y.dot(d.lapX)); });
    add("XDY_simple", "grad_X Y = (1/3)(div X) Y", SimpleRotation,
        [](const CkfParams&, const Vector3d&, const Derivatives& d) {
          return maxnorm(d.along_Y(d.X) - d.div / 3.0 * d.Y);
        });
    add("XxYDY_simple", "grad_{X x Y} Y = 2 (X.Lap X) Y", SimpleRotation,
        [](const CkfParams&, const Vector3d&, const Derivatives& d) {
          return maxnorm(d.along_Y(d.X.cross(d.Y)) - 2.0 * d.X.dot(d.lapX) * d.Y);
        });
    add("curve_curvature", "X x grad_X X = (1/2) w^2 Y", SimpleRotation,
        [](const CkfParams&, const Vector3d&, const Derivatives& d) {
          return maxnorm(d.X.cross(d.along_X(d.X)) - 0.5 * d.w * d.w * d.Y);
        });
    add("frame_orthonormal", "T = X/w, N = (X x Y)/|X x Y|, B = Y/|Y| orthonormal", SimpleRotation,
        [](const CkfParams& p, const Vector3d& x, const Derivatives&) {
          const FieldFrame f = frame_at(p, x);
          Mat3<double> m;
          m << *f.T, *f.N, *f.B;
          return (m.transpose() * m - Mat3<double>::Identity()).cwiseAbs().maxCoeff();
        });
    return t;
  }();
  return table;
}

const Entry& find_entry(const std::string& id) {
  for (const Entry& e : entries())
    if (e.info.id == id) return e;
  throw Error(ErrorKind::UnknownIdentity, id);
}

IdentityReport make_report(const Entry& e, const CkfParams& p, const Vector3d& x, const Derivatives& d,
                           double tolerance) {
  IdentityReport r;
  r.identity_id = e.info.id;
  r.point = x;
  r.residual = e.check(p, x, d);
  r.tolerance = tolerance;
  r.pass = r.residual <= tolerance;
  return r;
}

}  // namespace

const std::vector<IdentityInfo>& identity_registry() {
  static const std::vector<IdentityInfo> infos = [] {
    std::vector<IdentityInfo> v;
    for (const Entry& e : entries()) v.push_back(e.info);
    return v;
  }();
  return infos;
}

IdentityReport check_identity(const std::string& id, const CkfParams& p, const Vector3d& x, double tolerance) {
  const Entry& e = find_entry(id);
  return make_report(e, p, x, derivatives(p, x), tolerance);
}

std::vector<IdentityReport> run_identity_suite(const CkfParams& p, int n_points, std::uint64_t seed,
                                               double tolerance) {
  if (n_points < 1) throw Error(ErrorKind::InvalidArgument, "n_points must be >= 1");
  const double mag = p.magnitude();
  const bool simple = simple_rotation_residual(p).max_abs() <= kClassifyEps * mag * mag;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<IdentityReport> out;
  int accepted = 0;
  while (accepted < n_points) {
    const Vector3d x(u(rng), u(rng), u(rng));
    if (eval_ckf(p, x).norm() <= kFrameEps) continue;
    ++accepted;
    const Derivatives d = derivatives(p, x);
    for (const Entry& e : entries()) {
      if (e.info.scope == IdentityScope::SimpleRotation && !simple) continue;
      try {
        out.push_back(make_report(e, p, x, d, tolerance));
      } catch (const Error& err) {
        if (err.kind() != ErrorKind::FrameUndefined) throw;
      }
    }
  }
  return out;
}

IdentityCampaign identity_campaign(int n_general, int n_simple, std::uint64_t seed, double tolerance) {
  static constexpr CkfKind kKinds[] = {CkfKind::Translation, CkfKind::Dilation, CkfKind::Rotation, CkfKind::Special};
  std::mt19937_64 rng(seed);
  IdentityCampaign out;
  auto absorb = [&](const std::vector<IdentityReport>& reports) {
    for (const IdentityReport& r : reports) {
      ++out.checks;
      if (r.residual >= out.worst_residual) {
        out.worst_residual = r.residual;
        out.worst_id = r.identity_id;
      }
      if (!r.pass) {
        ++out.failures;
        out.failed.push_back(r);
      }
    }
  };
  for (int i = 0; i < n_general; ++i) {
    const CkfParams p = random_ckf(rng);
    absorb(run_identity_suite(p, 1, rng(), tolerance));
  }
  for (int i = 0; i < n_simple; ++i) {
    const CkfParams p = random_simple_rotation(rng, kKinds[i % 4]);
    absorb(run_identity_suite(p, 1, rng(), tolerance));
  }
  return out;
}

double pauli_product_residual(const Vector3d& a, const Vector3d& b) {
  const std::complex<double> i(0.0, 1.0);
  const Matrix2c lhs = sigma_dot(a) * sigma_dot(b);
  const Matrix2c rhs = a.dot(b) * Matrix2c::Identity() + i * sigma_dot(a.cross(b));
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

double triple_product_residual(const Vector3d& a, const Vector3d& b, const Vector3d& c) {
  return maxnorm(a.cross(b.cross(c)) - (a.dot(c) * b - a.dot(b) * c));
}

}  // namespace ckfz
