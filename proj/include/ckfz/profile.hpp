#ifndef CKFZ_PROFILE_HPP_
#define CKFZ_PROFILE_HPP_

#include <vector>

#include "ckfz/autodiff.hpp"

namespace ckfz {

// Scalar profile of one variable; derivatives come from evaluating at a dual scalar.
struct Profile {
  enum class Kind { Constant, Polynomial, Gaussian, SmoothBump, Cosine };

  Kind kind = Kind::Constant;
  double value = 1.0;                 // Constant
  std::vector<double> coefficients;   // Polynomial, lowest order first
  double center = 0.0, width = 1.0;   // Gaussian
  double lo = 0.0, hi = 1.0;          // SmoothBump support
  double amplitude = 1.0;             // Gaussian, SmoothBump, Cosine
  double frequency = 1.0, offset = 0.0;  // Cosine: offset + amplitude cos(frequency u)

  static Profile constant(double v) {
    Profile p;
    p.value = v;
    return p;
  }
  static Profile polynomial(std::vector<double> c) {
    Profile p;
    p.kind = Kind::Polynomial;
    p.coefficients = std::move(c);
    return p;
  }
  static Profile gaussian(double center, double width, double amplitude) {
    Profile p;
    p.kind = Kind::Gaussian;
    p.center = center;
    p.width = width;
    p.amplitude = amplitude;
    return p;
  }
  // amplitude exp(-1/(1 - s^2)) for s = (2u - lo - hi)/(hi - lo) in (-1, 1), else 0.
  static Profile smooth_bump(double lo, double hi, double amplitude) {
    Profile p;
    p.kind = Kind::SmoothBump;
    p.lo = lo;
    p.hi = hi;
    p.amplitude = amplitude;
    return p;
  }
  static Profile cosine(double frequency, double amplitude, double offset) {
    Profile p;
    p.kind = Kind::Cosine;
    p.frequency = frequency;
    p.amplitude = amplitude;
    p.offset = offset;
    return p;
  }

  template <class T>
  T operator()(const T& u) const {
    switch (kind) {
      case Kind::Constant:
        return T(value);
      case Kind::Polynomial: {
        T acc(0.0);
        for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * u + T(*it);
        return acc;
      }
      case Kind::Gaussian: {
        const T z = (u - T(center)) / T(width);
        return T(amplitude) * exp(T(-0.5) * z * z);
      }
      case Kind::SmoothBump: {
        const T s = (T(2.0) * u - T(lo + hi)) / T(hi - lo);
        const double sp = primal(s);
        if (!(sp > -1.0 && sp < 1.0)) return T(0.0);
        return T(amplitude) * exp(T(-1.0) / (T(1.0) - s * s));
      }
      case Kind::Cosine:
        return T(offset) + T(amplitude) * cos(T(frequency) * u);
    }
    return T(0.0);
  }
};

}  // namespace ckfz

#endif  // CKFZ_PROFILE_HPP_
