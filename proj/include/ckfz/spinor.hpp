#ifndef CKFZ_SPINOR_HPP_
#define CKFZ_SPINOR_HPP_

#include <complex>

#include <Eigen/Core>

#include "ckfz/autodiff.hpp"

namespace ckfz {

using Vector3d = Vec3<double>;
using Spinor2 = Eigen::Vector2cd;
using Matrix2c = Eigen::Matrix2cd;

// C^2-valued quantity over a real scalar type. Real and imaginary parts are
// stored separately so that T may be a (nested) dual number.
template <class T>
struct Spinor {
  Eigen::Matrix<T, 2, 1> re = Eigen::Matrix<T, 2, 1>::Zero();
  Eigen::Matrix<T, 2, 1> im = Eigen::Matrix<T, 2, 1>::Zero();

  static Spinor from(const Spinor2& s) {
    Spinor out;
    for (int k = 0; k < 2; ++k) {
      out.re[k] = T(s[k].real());
      out.im[k] = T(s[k].imag());
    }
    return out;
  }

  Spinor& operator+=(const Spinor& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  Spinor& operator-=(const Spinor& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
};

template <class T>
Spinor<T> operator+(Spinor<T> a, const Spinor<T>& b) {
  return a += b;
}
template <class T>
Spinor<T> operator-(Spinor<T> a, const Spinor<T>& b) {
  return a -= b;
}
template <class T>
Spinor<T> operator*(const T& s, const Spinor<T>& a) {
  Spinor<T> out;
  out.re = a.re * s;
  out.im = a.im * s;
  return out;
}
template <class T>
  requires(!std::same_as<T, double>)
Spinor<T> operator*(double s, const Spinor<T>& a) {
  return T(s) * a;
}

// Multiply by the complex scalar (cr + i ci).
template <class T>
Spinor<T> cmul(const T& cr, const T& ci, const Spinor<T>& a) {
  Spinor<T> out;
  out.re = a.re * cr - a.im * ci;
  out.im = a.im * cr + a.re * ci;
  return out;
}

template <class T>
Spinor<T> times_i(const Spinor<T>& a) {
  Spinor<T> out;
  out.re = -a.im;
  out.im = a.re;
  return out;
}

// sigma_j applied to a, j in {0, 1, 2}.
template <class T>
Spinor<T> pauli(int j, const Spinor<T>& a) {
  Spinor<T> out;
  switch (j) {
    case 0:
      out.re << a.re[1], a.re[0];
      out.im << a.im[1], a.im[0];
      break;
    case 1:  // (-i a1, i a0)
      out.re << a.im[1], -a.im[0];
      out.im << -a.re[1], a.re[0];
      break;
    default:
      out.re << a.re[0], -a.re[1];
      out.im << a.im[0], -a.im[1];
      break;
  }
  return out;
}

// (sigma . v) a for a real vector v.
template <class T>
Spinor<T> pauli_dot(const Vec3<T>& v, const Spinor<T>& a) {
  Spinor<T> out;
  // [[v3, v1 - i v2], [v1 + i v2, -v3]]
  out.re[0] = v[2] * a.re[0] + v[0] * a.re[1] + v[1] * a.im[1];
  out.im[0] = v[2] * a.im[0] + v[0] * a.im[1] - v[1] * a.re[1];
  out.re[1] = v[0] * a.re[0] - v[1] * a.im[0] - v[2] * a.re[1];
  out.im[1] = v[0] * a.im[0] + v[1] * a.re[0] - v[2] * a.im[1];
  return out;
}

template <class T>
T norm2(const Spinor<T>& a) {
  return a.re.squaredNorm() + a.im.squaredNorm();
}

inline Spinor2 to_complex(const Spinor<double>& a) {
  return Spinor2(std::complex<double>(a.re[0], a.im[0]), std::complex<double>(a.re[1], a.im[1]));
}

// Primal part of a spinor over a dual scalar.
template <class T>
Spinor2 primal_spinor(const Spinor<T>& a) {
  return Spinor2(std::complex<double>(primal(a.re[0]), primal(a.im[0])),
                 std::complex<double>(primal(a.re[1]), primal(a.im[1])));
}

inline const Matrix2c& pauli_matrix(int j) {
  static const Matrix2c s[3] = {
      (Matrix2c() << 0, 1, 1, 0).finished(),
      (Matrix2c() << 0, std::complex<double>(0, -1), std::complex<double>(0, 1), 0).finished(),
      (Matrix2c() << 1, 0, 0, -1).finished()};
  return s[j];
}

inline Matrix2c sigma_dot(const Vector3d& v) {
  return v[0] * pauli_matrix(0) + v[1] * pauli_matrix(1) + v[2] * pauli_matrix(2);
}

// Value and the three partial derivatives of a generic spinor field.
template <class T>
struct SpinorJet {
  Spinor<T> value;
  std::array<Spinor<T>, 3> partial;
};

template <class T, class F>
SpinorJet<T> spinor_jet(F&& field, const Vec3<T>& x) {
  const Spinor<Jet<T>> y = field(seed(x));
  SpinorJet<T> out;
  for (int k = 0; k < 2; ++k) {
    out.value.re[k] = y.re[k].v;
    out.value.im[k] = y.im[k].v;
    for (int i = 0; i < 3; ++i) {
      out.partial[i].re[k] = y.re[k].d[i];
      out.partial[i].im[k] = y.im[k].d[i];
    }
  }
  return out;
}

}  // namespace ckfz

#endif  // CKFZ_SPINOR_HPP_
