#include "spec_io.hpp"

#include <cmath>
#include <sstream>

#include "ckfz/error.hpp"

namespace ckfz::io {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::InvalidArgument, what); }

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\n");
  if (a == std::string::npos) return "";
  return s.substr(a, s.find_last_not_of(" \t\n") - a + 1);
}

double to_double(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    bad("not a number: '" + text + "'");
  }
  if (trim(text.substr(used)) != "") bad("not a number: '" + text + "'");
  return v;
}

// Value after "<prefix>:" as a number, or nullopt when text does not start with it.
std::optional<double> suffix_number(const std::string& text, const std::string& prefix) {
  if (text.rfind(prefix + ":", 0) != 0) return std::nullopt;
  return to_double(text.substr(prefix.size() + 1));
}

json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    bad(std::string("malformed JSON: ") + e.what());
  }
}

json spinor_to_json(const Spinor2& s) {
  return json::array({json::array({s(0).real(), s(0).imag()}), json::array({s(1).real(), s(1).imag()})});
}

Spinor2 spinor_value(const json& j) {
  if (!j.is_array() || j.size() != 2) bad("spinor must be [[re, im], [re, im]]");
  Spinor2 s;
  for (int k = 0; k < 2; ++k) {
    const json& c = j[k];
    if (c.is_number()) {
      s(k) = c.get<double>();
    } else if (c.is_array() && c.size() == 2) {
      s(k) = std::complex<double>(c[0].get<double>(), c[1].get<double>());
    } else {
      bad("spinor component must be a number or [re, im]");
    }
  }
  return s;
}

Spinor2 default_spinor() { return Spinor2(std::complex<double>(1, 0.2), std::complex<double>(-0.5, 0.7)); }

}  // namespace

json to_json(const Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

Vector3d vector_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) bad("expected a 3-vector, got " + j.dump());
  for (const json& e : j) {
    if (!e.is_number()) bad("expected a 3-vector, got " + j.dump());
  }
  return Vector3d(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item)));
  return out;
}

Vector3d parse_vector(const std::string& text) {
  const std::vector<double> v = parse_list(text);
  if (v.size() != 3) bad("expected x,y,z, got '" + text + "'");
  return Vector3d(v[0], v[1], v[2]);
}

json to_json(const CkfParams& p) { return {{"a", to_json(p.a)}, {"b0", p.b0}, {"b", to_json(p.b)}, {"c", to_json(p.c)}}; }

CkfParams ckf_from_json(const json& j) {
  if (!j.is_object()) bad("a CKF must be a shorthand or an object with keys a, b0, b, c");
  CkfParams p;
  for (const auto& [key, value] : j.items()) {
    if (key == "a") {
      p.a = vector_from_json(value);
    } else if (key == "b0") {
      if (!value.is_number()) bad("b0 must be a number");
      p.b0 = value.get<double>();
    } else if (key == "b") {
      p.b = vector_from_json(value);
    } else if (key == "c") {
      p.c = vector_from_json(value);
    } else {
      bad("unknown CKF key '" + key + "'");
    }
  }
  if (!p.finite()) bad("CKF coefficients must be finite");
  return p;
}

CkfParams parse_ckf(const std::string& raw) {
  const std::string text = trim(raw);
  if (!text.empty() && text.front() == '{') return ckf_from_json(parse_json_text(text));
  // Sums of shorthands, e.g. the isoclinic field ro+cr:1.
  CkfParams sum;
  std::stringstream ss(text);
  std::string term;
  int terms = 0;
  while (std::getline(ss, term, '+')) {
    const auto p = parse_shorthand(trim(term));
    if (!p) bad("unknown CKF '" + text + "' (use ud, ro, cr:<mu>, sums of these, or a JSON object)");
    sum = sum + *p;
    ++terms;
  }
  if (terms == 0) bad("empty CKF");
  return sum;
}

json to_json(const Profile& p) {
  switch (p.kind) {
    case Profile::Kind::Constant:
      return {{"kind", "constant"}, {"value", p.value}};
    case Profile::Kind::Polynomial:
      return {{"kind", "polynomial"}, {"coefficients", p.coefficients}};
    case Profile::Kind::Gaussian:
      return {{"kind", "gaussian"}, {"center", p.center}, {"width", p.width}, {"amplitude", p.amplitude}};
    case Profile::Kind::SmoothBump:
      return {{"kind", "smooth_bump"}, {"lo", p.lo}, {"hi", p.hi}, {"amplitude", p.amplitude}};
    case Profile::Kind::Cosine:
      return {{"kind", "cosine"}, {"frequency", p.frequency}, {"amplitude", p.amplitude}, {"offset", p.offset}};
  }
  return {};
}

Profile profile_from_json(const json& j) {
  if (j.is_number()) return Profile::constant(j.get<double>());
  if (!j.is_object() || !j.contains("kind")) bad("a profile needs a \"kind\"");
  const std::string kind = j["kind"].get<std::string>();
  try {
    if (kind == "constant") return Profile::constant(j.value("value", 1.0));
    if (kind == "polynomial") return Profile::polynomial(j.at("coefficients").get<std::vector<double>>());
    if (kind == "gaussian") {
      return Profile::gaussian(j.value("center", 0.0), j.value("width", 1.0), j.value("amplitude", 1.0));
    }
    if (kind == "smooth_bump") {
      const double lo = j.at("lo").get<double>(), hi = j.at("hi").get<double>();
      if (!(lo < hi)) bad("smooth_bump needs lo < hi");
      return Profile::smooth_bump(lo, hi, j.value("amplitude", 1.0));
    }
    if (kind == "cosine") {
      return Profile::cosine(j.value("frequency", 1.0), j.value("amplitude", 1.0), j.value("offset", 0.0));
    }
  } catch (const json::exception& e) {
    bad("profile '" + kind + "': " + e.what());
  }
  bad("unknown profile kind '" + kind + "'");
}

json to_json(const PotentialSpec& s) {
  using K = PotentialSpec::Kind;
  json j = {{"kind", to_string(s.kind)}};
  switch (s.kind) {
    case K::Zero:
    case K::LossYau:
      break;
    case K::Axial:
      j["first"] = to_json(s.first);
      j["second"] = to_json(s.second);
      break;
    case K::HopfBase:
      j["mu"] = s.mu;
      break;
    case K::Modulated:
      j["base"] = to_json(*s.base);
      j["first"] = to_json(s.first);
      j["second"] = to_json(s.second);
      break;
    case K::GaugeShift:
      j["base"] = to_json(*s.base);
      j["gauge"] = s.gauge == PotentialSpec::Gauge::Linear ? "linear" : "sin_x1_x2";
      if (s.gauge == PotentialSpec::Gauge::Linear) j["k"] = to_json(s.gauge_k);
      break;
  }
  if (s.scale != 1.0) j["scale"] = s.scale;
  return j;
}

PotentialSpec potential_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind")) bad("a potential needs a \"kind\"");
  const std::string kind = j["kind"].get<std::string>();
  PotentialSpec s;
  try {
    if (kind == "zero") {
      s = PotentialSpec::zero();
    } else if (kind == "axial") {
      s = PotentialSpec::axial(profile_from_json(j.at("first")), j.contains("second")
                                                                      ? profile_from_json(j["second"])
                                                                      : Profile::constant(1.0));
    } else if (kind == "hopf_base") {
      s = PotentialSpec::hopf_base(j.value("mu", 1.0));
    } else if (kind == "modulated") {
      s = PotentialSpec::modulated(potential_from_json(j.at("base")), profile_from_json(j.at("first")),
                                   profile_from_json(j.at("second")));
    } else if (kind == "loss_yau") {
      s = PotentialSpec::loss_yau();
    } else if (kind == "gauge_shift") {
      const std::string g = j.value("gauge", std::string("sin_x1_x2"));
      if (g != "linear" && g != "sin_x1_x2") bad("gauge must be linear or sin_x1_x2");
      s = PotentialSpec::gauge_shift(
          potential_from_json(j.at("base")),
          g == "linear" ? PotentialSpec::Gauge::Linear : PotentialSpec::Gauge::SinX1TimesX2,
          j.contains("k") ? vector_from_json(j["k"]) : Vector3d::Zero());
    } else {
      bad("unknown potential kind '" + kind + "'");
    }
  } catch (const json::exception& e) {
    bad("potential '" + kind + "': " + e.what());
  }
  s.scale = j.value("scale", 1.0);
  return s;
}

PotentialSpec parse_potential(const std::string& raw) {
  const std::string text = trim(raw);
  if (!text.empty() && text.front() == '{') return potential_from_json(parse_json_text(text));
  if (text == "zero") return PotentialSpec::zero();
  if (text == "losyau") return PotentialSpec::loss_yau();
  if (text == "axial-bump") {
    return PotentialSpec::axial(Profile::smooth_bump(0.5, 6.0, 2.0), Profile::smooth_bump(-1.5, 1.5, 1.0));
  }
  if (const auto mu = suffix_number(text, "hopf")) return PotentialSpec::hopf_base(*mu);
  if (const auto mu = suffix_number(text, "modulated")) {
    return PotentialSpec::modulated(PotentialSpec::hopf_base(*mu), Profile::smooth_bump(0.05, 0.95, 1.5),
                                    Profile::cosine(2.0, 0.4, 1.0));
  }
  bad("unknown potential '" + text + "' (use zero, losyau, hopf:<mu>, axial-bump, modulated:<mu> or JSON)");
}

json to_json(const SpinorField& f) {
  using K = SpinorField::Kind;
  switch (f.kind) {
    case K::Constant:
      return {{"kind", "constant"}, {"spinor", spinor_to_json(f.spinor)}};
    case K::PlaneWave:
      return {{"kind", "plane_wave"}, {"k", to_json(f.wavevector)}, {"spinor", spinor_to_json(f.spinor)}};
    case K::Gaussian:
      return {{"kind", "gaussian"},
              {"center", to_json(f.center)},
              {"width", f.width},
              {"modulation", to_json(f.modulation)},
              {"k", to_json(f.wavevector)},
              {"spinor", spinor_to_json(f.spinor)}};
    case K::BumpBall:
      return {{"kind", "bump_ball"}, {"center", to_json(f.center)}, {"radius", f.width}, {"spinor", spinor_to_json(f.spinor)}};
    case K::BumpTorus:
      return {{"kind", "bump_torus"},
              {"r0", f.torus_radius},
              {"z0", f.torus_height},
              {"delta", f.width},
              {"spinor", spinor_to_json(f.spinor)}};
    case K::LossYauMode:
      return {{"kind", "loss_yau_mode"}};
  }
  return {};
}

SpinorField spinor_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind")) bad("a spinor field needs a \"kind\"");
  const std::string kind = j["kind"].get<std::string>();
  const Spinor2 s = j.contains("spinor") ? spinor_value(j["spinor"]) : default_spinor();
  auto vec = [&](const char* key) { return j.contains(key) ? vector_from_json(j[key]) : Vector3d::Zero(); };
  try {
    if (kind == "constant") return SpinorField::constant(s);
    if (kind == "plane_wave") return SpinorField::plane_wave(vec("k"), s);
    if (kind == "gaussian") return SpinorField::gaussian(vec("center"), j.value("width", 1.0), s, vec("modulation"), vec("k"));
    if (kind == "bump_ball") return SpinorField::bump_ball(vec("center"), j.value("radius", 1.0), s);
    if (kind == "bump_torus") return SpinorField::bump_torus(j.value("r0", 1.5), j.value("z0", 0.0), j.value("delta", 0.5), s);
    if (kind == "loss_yau_mode") return SpinorField::loss_yau_mode();
  } catch (const json::exception& e) {
    bad("spinor field '" + kind + "': " + e.what());
  }
  bad("unknown spinor field kind '" + kind + "'");
}

SpinorField parse_spinor(const std::string& raw) {
  const std::string text = trim(raw);
  if (!text.empty() && text.front() == '{') return spinor_from_json(parse_json_text(text));
  if (text == "packet") {
    return SpinorField::gaussian(Vector3d(0.3, -0.2, 0.4), 0.8, default_spinor(), Vector3d(0.4, -0.1, 0.3),
                                 Vector3d(1.5, -0.7, 0.9));
  }
  if (text == "torus") {
    return SpinorField::bump_torus(1.5, 0.2, 0.6, Spinor2(std::complex<double>(1, 0.5), std::complex<double>(-0.3, 0.8)));
  }
  if (text == "ball") return SpinorField::bump_ball(Vector3d(0.2, 0.1, -0.3), 0.8, default_spinor());
  bad("unknown spinor field '" + text + "' (use packet, torus, ball or JSON)");
}

GridSpec parse_grid(const std::string& text, int stencil) {
  const std::vector<double> v = parse_list(text);
  if (v.size() != 2 || v[0] != std::floor(v[0])) bad("grid must be n,L with integer n, got '" + text + "'");
  GridSpec g;
  g.n = static_cast<int>(v[0]);
  g.L = v[1];
  g.stencil = stencil;
  g.validate();
  return g;
}

json to_json(const GridSpec& g) {
  return {{"n", g.n},
          {"L", g.L},
          {"h", g.h()},
          {"stencil", g.stencil},
          {"boundary", g.boundary == GridSpec::Boundary::Dirichlet ? "dirichlet" : "periodic"},
          {"dimension", g.dimension()}};
}

std::vector<double> parse_range(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(to_double(trim(item)));
  if (parts.size() == 1) return parts;
  if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) bad("range must be a:b:step with step > 0, got '" + text + "'");
  std::vector<double> out;
  const long count = std::lround(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
  if (count > 100000) bad("range has too many points");
  for (long i = 0; i <= count; ++i) out.push_back(parts[0] + static_cast<double>(i) * parts[2]);
  return out;
}

}  // namespace ckfz::io
