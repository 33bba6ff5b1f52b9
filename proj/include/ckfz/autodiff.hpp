#ifndef CKFZ_AUTODIFF_HPP_
#define CKFZ_AUTODIFF_HPP_

// Forward-mode dual numbers with N tangent directions.
//
// Dual<double, 3> carries a value and its gradient with respect to a point in R^3.
// Nesting (Dual<Dual<double, 3>, 3>) gives exact second derivatives; every analytic
// family in the library is written as a template over the scalar so that the same
// code path evaluates values, Jacobians and Hessians.

#include <array>
#include <cmath>
#include <concepts>
#include <type_traits>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace ckfz {

template <class S>
concept Arithmetic = std::is_arithmetic_v<S>;

template <class T, int N>
struct Dual {
  T v{};
  std::array<T, N> d{};

  Dual() = default;
  Dual(const T& value) : v(value) {}  // NOLINT(google-explicit-constructor)
  template <Arithmetic S>
    requires(!std::same_as<S, T>)
  Dual(S value) : v(T(value)) {}  // NOLINT
  Dual(const T& value, int direction) : v(value) { d[direction] = T(1); }

  Dual& operator+=(const Dual& o) {
    v += o.v;
    for (int i = 0; i < N; ++i) d[i] += o.d[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    for (int i = 0; i < N; ++i) d[i] -= o.d[i];
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    for (int i = 0; i < N; ++i) d[i] = d[i] * o.v + v * o.d[i];
    v *= o.v;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    const T inv = T(1) / o.v;
    const T q = v * inv;
    for (int i = 0; i < N; ++i) d[i] = (d[i] - q * o.d[i]) * inv;
    v = q;
    return *this;
  }
};

template <class T, int N>
Dual<T, N> operator-(const Dual<T, N>& a) {
  Dual<T, N> r;
  r.v = -a.v;
  for (int i = 0; i < N; ++i) r.d[i] = -a.d[i];
  return r;
}
template <class T, int N>
Dual<T, N> operator+(const Dual<T, N>& a) {
  return a;
}

#define CKFZ_DUAL_BINARY(op, opeq)                                                   \
  template <class T, int N>                                                         \
  Dual<T, N> operator op(Dual<T, N> a, const Dual<T, N>& b) {                       \
    a opeq b;                                                                       \
    return a;                                                                       \
  }                                                                                 \
  template <class T, int N>                                                         \
  Dual<T, N> operator op(Dual<T, N> a, const T& b) {                                \
    a opeq Dual<T, N>(b);                                                           \
    return a;                                                                       \
  }                                                                                 \
  template <class T, int N>                                                         \
  Dual<T, N> operator op(const T& a, const Dual<T, N>& b) {                         \
    Dual<T, N> r(a);                                                                \
    r opeq b;                                                                       \
    return r;                                                                       \
  }                                                                                 \
  template <class T, int N, Arithmetic S>                                           \
    requires(!std::same_as<S, T>)                                                   \
  Dual<T, N> operator op(Dual<T, N> a, S b) {                                       \
    a opeq Dual<T, N>(T(b));                                                        \
    return a;                                                                       \
  }                                                                                 \
  template <class T, int N, Arithmetic S>                                           \
    requires(!std::same_as<S, T>)                                                   \
  Dual<T, N> operator op(S a, const Dual<T, N>& b) {                                \
    Dual<T, N> r{T(a)};                                                             \
    r opeq b;                                                                       \
    return r;                                                                       \
  }

CKFZ_DUAL_BINARY(+, +=)
CKFZ_DUAL_BINARY(-, -=)
CKFZ_DUAL_BINARY(*, *=)
CKFZ_DUAL_BINARY(/, /=)
#undef CKFZ_DUAL_BINARY

// Value of the innermost scalar; used for branching and comparisons.
inline double primal(double x) { return x; }
template <class T, int N>
double primal(const Dual<T, N>& x) {
  return primal(x.v);
}

template <class T, int N>
bool operator<(const Dual<T, N>& a, const Dual<T, N>& b) {
  return primal(a) < primal(b);
}
template <class T, int N>
bool operator>(const Dual<T, N>& a, const Dual<T, N>& b) {
  return primal(a) > primal(b);
}
template <class T, int N>
bool operator<=(const Dual<T, N>& a, const Dual<T, N>& b) {
  return primal(a) <= primal(b);
}
template <class T, int N>
bool operator>=(const Dual<T, N>& a, const Dual<T, N>& b) {
  return primal(a) >= primal(b);
}
template <class T, int N>
bool operator==(const Dual<T, N>& a, const Dual<T, N>& b) {
  return primal(a) == primal(b);
}
template <class T, int N>
bool operator!=(const Dual<T, N>& a, const Dual<T, N>& b) {
  return primal(a) != primal(b);
}

namespace detail {
// Chain rule: f(a) with f'(a.v) = df.
template <class T, int N>
Dual<T, N> chain(const Dual<T, N>& a, const T& f, const T& df) {
  Dual<T, N> r;
  r.v = f;
  for (int i = 0; i < N; ++i) r.d[i] = df * a.d[i];
  return r;
}
}  // namespace detail

using std::atan2;
using std::cos;
using std::exp;
using std::log;
using std::pow;
using std::sin;
using std::sqrt;

template <class T, int N>
Dual<T, N> sqrt(const Dual<T, N>& a) {
  const T s = sqrt(a.v);
  return detail::chain(a, s, T(0.5) / s);
}
template <class T, int N>
Dual<T, N> exp(const Dual<T, N>& a) {
  const T e = exp(a.v);
  return detail::chain(a, e, e);
}
template <class T, int N>
Dual<T, N> log(const Dual<T, N>& a) {
  return detail::chain(a, log(a.v), T(1) / a.v);
}
template <class T, int N>
Dual<T, N> sin(const Dual<T, N>& a) {
  return detail::chain(a, sin(a.v), cos(a.v));
}
template <class T, int N>
Dual<T, N> cos(const Dual<T, N>& a) {
  return detail::chain(a, cos(a.v), -sin(a.v));
}
template <class T, int N>
Dual<T, N> pow(const Dual<T, N>& a, double p) {
  const T f = pow(a.v, p);
  return detail::chain(a, f, T(p) * pow(a.v, p - 1.0));
}
template <class T, int N>
Dual<T, N> atan2(const Dual<T, N>& y, const Dual<T, N>& x) {
  const T r2 = x.v * x.v + y.v * y.v;
  Dual<T, N> r;
  r.v = atan2(y.v, x.v);
  for (int i = 0; i < N; ++i) r.d[i] = (x.v * y.d[i] - y.v * x.d[i]) / r2;
  return r;
}

template <class T>
using Vec3 = Eigen::Matrix<T, 3, 1>;
template <class T>
using Mat3 = Eigen::Matrix<T, 3, 3>;

template <class T>
using Jet = Dual<T, 3>;

// Lift a point to Jet coordinates: x_i carries the unit tangent e_i.
template <class T>
Vec3<Jet<T>> seed(const Vec3<T>& x) {
  Vec3<Jet<T>> out;
  for (int i = 0; i < 3; ++i) out[i] = Jet<T>(x[i], i);
  return out;
}

// Jacobian J(i, j) = d_i F_j of a generic vector field F at x.
template <class T, class F>
Mat3<T> jacobian(F&& field, const Vec3<T>& x) {
  const Vec3<Jet<T>> y = field(seed(x));
  Mat3<T> jac;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) jac(i, j) = y[j].d[i];
  return jac;
}

// Gradient of a generic scalar field at x.
template <class T, class F>
Vec3<T> gradient(F&& scalar, const Vec3<T>& x) {
  const Jet<T> y = scalar(seed(x));
  return Vec3<T>(y.d[0], y.d[1], y.d[2]);
}

// Curl from the Jacobian convention J(i, j) = d_i F_j.
template <class T>
Vec3<T> curl_of(const Mat3<T>& jac) {
  return Vec3<T>(jac(1, 2) - jac(2, 1), jac(2, 0) - jac(0, 2), jac(0, 1) - jac(1, 0));
}

template <class T>
Vec3<T> lift(const Vec3<double>& v) {
  return Vec3<T>(T(v[0]), T(v[1]), T(v[2]));
}

}  // namespace ckfz

namespace Eigen {
template <class T, int N>
struct NumTraits<ckfz::Dual<T, N>> : NumTraits<double> {
  using Real = ckfz::Dual<T, N>;
  using NonInteger = ckfz::Dual<T, N>;
  using Nested = ckfz::Dual<T, N>;
  using Literal = ckfz::Dual<T, N>;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 1,
    AddCost = 1 + N,
    MulCost = 1 + 2 * N
  };
  static inline Real epsilon() { return Real(std::numeric_limits<double>::epsilon()); }
  static inline Real dummy_precision() { return Real(1e-12); }
  static inline Real highest() { return Real(std::numeric_limits<double>::max()); }
  static inline Real lowest() { return Real(std::numeric_limits<double>::lowest()); }
  static inline int digits10() { return std::numeric_limits<double>::digits10; }
};
}  // namespace Eigen

#endif  // CKFZ_AUTODIFF_HPP_
