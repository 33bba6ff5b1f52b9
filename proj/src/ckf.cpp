#include "ckfz/ckf.hpp"

#include <cmath>
#include <string>

#include "ckfz/error.hpp"

namespace ckfz {

double CkfParams::magnitude() const {
  return std::max({a.norm(), std::abs(b0), b.norm(), c.norm()});
}

bool CkfParams::finite() const {
  return a.allFinite() && std::isfinite(b0) && b.allFinite() && c.allFinite();
}

CkfParams operator+(const CkfParams& p, const CkfParams& q) {
  return CkfParams{p.a + q.a, p.b0 + q.b0, p.b + q.b, p.c + q.c};
}

CkfParams operator*(double s, const CkfParams& p) {
  return CkfParams{s * p.a, s * p.b0, s * p.b, s * p.c};
}

CkfParams ud_field() { return CkfParams{Vector3d::UnitZ(), 0.0, Vector3d::Zero(), Vector3d::Zero()}; }

CkfParams ro_field() { return CkfParams{Vector3d::Zero(), 0.0, Vector3d::UnitZ(), Vector3d::Zero()}; }

CkfParams cr_field(double mu) {
  if (!(mu > 0.0)) throw Error(ErrorKind::InvalidArgument, "cr field requires mu > 0");
  return CkfParams{0.5 * mu * mu * Vector3d::UnitZ(), 0.0, Vector3d::Zero(), Vector3d::UnitZ()};
}

std::optional<CkfParams> parse_shorthand(const std::string& text) {
  if (text == "ud") return ud_field();
  if (text == "ro") return ro_field();
  if (text.rfind("cr:", 0) == 0) {
    try {
      std::size_t used = 0;
      const double mu = std::stod(text.substr(3), &used);
      if (used != text.size() - 3 || !(mu > 0.0)) return std::nullopt;
      return cr_field(mu);
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

FieldFrame field_data_at(const CkfParams& p, const Vector3d& x) {
  FieldFrame f;
  f.x = x;
  f.X = eval_ckf(p, x);
  f.w = f.X.norm();
  f.divX = div_ckf(p, x);
  f.Y = curl_ckf(p, x);
  f.XxY = f.X.cross(f.Y);
  const double ny = f.Y.norm();
  if (f.w > kFrameEps && ny > kFrameEps) {
    f.T = f.X / f.w;
    f.B = f.Y / ny;
    const double nz = f.XxY.norm();
    if (nz > 0.0) f.N = f.XxY / nz;
  }
  return f;
}

FieldFrame frame_at(const CkfParams& p, const Vector3d& x) {
  FieldFrame f = field_data_at(p, x);
  if (!f.T || !f.N) {
    throw Error(ErrorKind::FrameUndefined,
                "w = " + std::to_string(f.w) + ", |Y| = " + std::to_string(f.Y.norm()));
  }
  return f;
}

double SimpleRotationResidual::max_abs() const {
  return std::max({std::abs(a_dot_b), std::abs(c_dot_b), b0b_minus_cxa.cwiseAbs().maxCoeff()});
}

SimpleRotationResidual simple_rotation_residual(const CkfParams& p) {
  // X . Y = 2 a.b + 2 (a x c + b0 b).x + (b.c)|x|^2
  return SimpleRotationResidual{p.a.dot(p.b), p.c.dot(p.b), p.b0 * p.b - p.c.cross(p.a)};
}

const char* to_string(CkfKind kind) {
  switch (kind) {
    case CkfKind::Translation: return "Translation";
    case CkfKind::Dilation: return "Dilation";
    case CkfKind::Rotation: return "Rotation";
    case CkfKind::Special: return "Special";
  }
  return "Unknown";
}

const char* to_string(FixedPointKind kind) {
  switch (kind) {
    case FixedPointKind::Monopole: return "Monopole";
    case FixedPointKind::Pair: return "Pair";
    case FixedPointKind::Dipole: return "Dipole";
  }
  return "Unknown";
}

double CanonicalForm::mu() const {
  return (kind == CkfKind::Special && nu > 0.0) ? std::sqrt(2.0 * nu) : 0.0;
}

CanonicalForm classify(const CkfParams& p) {
  if (!p.finite()) throw Error(ErrorKind::InvalidArgument, "non-finite parameters");
  const double mag = p.magnitude();
  if (mag == 0.0) throw Error(ErrorKind::ZeroField, "all parameters vanish");

  // The residual is bilinear in the parameters.
  const double res = simple_rotation_residual(p).max_abs();
  if (res > kClassifyEps * mag * mag) {
    throw Error(ErrorKind::NotSimpleRotation, "residual " + std::to_string(res / (mag * mag)));
  }
  const double zero = kClassifyEps * mag;

  CanonicalForm f;
  const double nc = p.c.norm();
  const double nb = p.b.norm();
  if (nc > zero) {
    const double c2 = nc * nc;
    f.kind = CkfKind::Special;
    f.x0 = (p.c.cross(p.b) - p.b0 * p.c) / c2;
    f.nu = 0.5 * (2.0 * p.a.dot(p.c) + p.b.squaredNorm() - p.b0 * p.b0) / c2;
    f.axis = p.c / nc;
    f.scale = nc;
    f.admissible = f.nu > 0.0;
  } else if (nb > zero) {
    f.kind = CkfKind::Rotation;
    f.x0 = p.b.cross(p.a) / (nb * nb);
    f.axis = p.b / nb;
    f.scale = nb;
    f.admissible = true;
  } else if (std::abs(p.b0) > zero) {
    f.kind = CkfKind::Dilation;
    f.x0 = -p.a / p.b0;
    f.scale = std::abs(p.b0);
    f.b0_sign = p.b0 > 0.0 ? 1.0 : -1.0;
    f.admissible = false;
  } else {
    f.kind = CkfKind::Translation;
    f.scale = p.a.norm();
    f.axis = p.a / f.scale;
    f.admissible = true;
  }
  return f;
}

CkfParams reconstruct(const CanonicalForm& f) {
  CkfParams p;
  switch (f.kind) {
    case CkfKind::Translation:
      p.a = f.scale * f.axis;
      break;
    case CkfKind::Dilation:
      p.b0 = f.b0_sign * f.scale;
      p.a = -p.b0 * f.x0;
      break;
    case CkfKind::Rotation:
      p.b = f.scale * f.axis;
      p.a = -p.b.cross(f.x0);
      break;
    case CkfKind::Special:
      // nu c + (c.(x - x0))(x - x0) - |x - x0|^2 c / 2 expanded about the origin.
      p.c = f.scale * f.axis;
      p.b0 = -p.c.dot(f.x0);
      p.b = f.x0.cross(p.c);
      p.a = f.nu * p.c + p.c.dot(f.x0) * f.x0 - 0.5 * f.x0.squaredNorm() * p.c;
      break;
  }
  return p;
}

double killing_residual_of_curl(const CkfParams& p, const Vector3d& x) {
  const auto curl = [&p](const auto& y) {
    using S = typename std::decay_t<decltype(y)>::Scalar;
    return curl_of(jacobian([&p](const auto& z) { return eval_ckf(p, z); }, Vec3<S>(y)));
  };
  const Mat3<double> dy = jacobian(curl, x);
  return (dy + dy.transpose()).cwiseAbs().maxCoeff();
}

double conformal_killing_residual(const CkfParams& p, const Vector3d& x) {
  const Mat3<double> jac = jacobian([&p](const auto& z) { return eval_ckf(p, z); }, x);
  const Mat3<double> r = jac + jac.transpose() - (2.0 / 3.0) * jac.trace() * Mat3<double>::Identity();
  return r.cwiseAbs().maxCoeff();
}

FixedPointCensus fixed_point_census(const CkfParams& p) {
  FixedPointCensus census;
  CanonicalForm f;
  try {
    f = classify(p);
  } catch (const Error&) {
    return census;
  }
  switch (f.kind) {
    case CkfKind::Translation:
      break;
    case CkfKind::Dilation:
      census.isolated.push_back({f.x0, FixedPointKind::Monopole});
      break;
    case CkfKind::Rotation:
      census.locus = FixedPointCensus::Locus::Line;
      census.locus_center = f.x0;
      census.locus_axis = f.axis;
      break;
    case CkfKind::Special:
      if (f.nu < 0.0) {
        const Vector3d off = std::sqrt(2.0 * std::abs(f.nu)) * f.axis;
        census.isolated.push_back({f.x0 + off, FixedPointKind::Pair});
        census.isolated.push_back({f.x0 - off, FixedPointKind::Pair});
      } else if (f.nu == 0.0) {
        census.isolated.push_back({f.x0, FixedPointKind::Dipole});
      } else {
        census.locus = FixedPointCensus::Locus::Circle;
        census.locus_center = f.x0;
        census.locus_axis = f.axis;
        census.locus_radius = f.mu();
      }
      break;
  }
  return census;
}

CkfParams random_ckf(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CkfParams p;
  p.a = Vector3d(u(rng), u(rng), u(rng));
  p.b0 = u(rng);
  p.b = Vector3d(u(rng), u(rng), u(rng));
  p.c = Vector3d(u(rng), u(rng), u(rng));
  return p;
}

CkfParams random_simple_rotation(std::mt19937_64& rng, CkfKind kind) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> pos(0.2, 1.5);
  auto vec = [&] { return Vector3d(u(rng), u(rng), u(rng)); };
  CanonicalForm f;
  f.kind = kind;
  switch (kind) {
    case CkfKind::Translation:
      f.axis = vec().normalized();
      f.scale = pos(rng);
      break;
    case CkfKind::Dilation:
      f.x0 = vec();
      f.scale = pos(rng);
      f.b0_sign = u(rng) > 0 ? 1.0 : -1.0;
      break;
    case CkfKind::Rotation: {
      f.axis = vec().normalized();
      const Vector3d v = vec();
      f.x0 = v - v.dot(f.axis) * f.axis;
      f.scale = pos(rng);
      break;
    }
    case CkfKind::Special:
      f.axis = vec().normalized();
      f.x0 = vec();
      f.scale = pos(rng);
      f.nu = u(rng);
      break;
  }
  return reconstruct(f);
}

}  // namespace ckfz
