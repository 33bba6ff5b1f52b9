#ifndef CKFZ_SPINOR_FIELD_HPP_
#define CKFZ_SPINOR_FIELD_HPP_

#include <utility>

#include "ckfz/error.hpp"
#include "ckfz/spinor.hpp"

namespace ckfz {

// Analytic C^2-valued test fields. Evaluation is templated on the scalar so that
// exact first and second derivatives come from (nested) dual numbers.
struct SpinorField {
  enum class Kind { Constant, PlaneWave, Gaussian, BumpBall, BumpTorus, LossYauMode };

  Kind kind = Kind::Constant;
  Spinor2 spinor = Spinor2(1.0, 0.0);
  Vector3d center = Vector3d::Zero();     // Gaussian, BumpBall
  double width = 1.0;                     // Gaussian width, BumpBall radius, BumpTorus tube radius
  Vector3d wavevector = Vector3d::Zero(); // PlaneWave, Gaussian phase e^{i k.x}
  Vector3d modulation = Vector3d::Zero(); // Gaussian: (1 + m.(x - center))
  double torus_radius = 1.0;              // BumpTorus: distance of the tube centre from the x3-axis
  double torus_height = 0.0;              // BumpTorus: x3 of the tube centre

  static SpinorField constant(const Spinor2& s) {
    SpinorField f;
    f.spinor = s;
    return f;
  }
  static SpinorField plane_wave(const Vector3d& k, const Spinor2& s) {
    SpinorField f;
    f.kind = Kind::PlaneWave;
    f.wavevector = k;
    f.spinor = s;
    return f;
  }
  // exp(-|x - c|^2 / (2 width^2)) (1 + m.(x - c)) e^{i k.x} s
  static SpinorField gaussian(const Vector3d& c, double width, const Spinor2& s,
                              const Vector3d& m = Vector3d::Zero(), const Vector3d& k = Vector3d::Zero()) {
    SpinorField f;
    f.kind = Kind::Gaussian;
    f.center = c;
    f.width = width;
    f.spinor = s;
    f.modulation = m;
    f.wavevector = k;
    return f;
  }
  // exp(-1/(1 - |x - c|^2/radius^2)) s inside the ball, zero outside.
  static SpinorField bump_ball(const Vector3d& c, double radius, const Spinor2& s) {
    SpinorField f;
    f.kind = Kind::BumpBall;
    f.center = c;
    f.width = radius;
    f.spinor = s;
    return f;
  }
  // Bump supported in the solid torus ((r - r0)^2 + (x3 - z0)^2 < delta^2) about the x3-axis.
  // Needs 0 < delta < r0 so that the support stays off the axis and the field is smooth.
  static SpinorField bump_torus(double r0, double z0, double delta, const Spinor2& s) {
    if (!(delta > 0.0 && delta < r0)) throw Error(ErrorKind::InvalidArgument, "bump_torus needs 0 < delta < r0");
    SpinorField f;
    f.kind = Kind::BumpTorus;
    f.torus_radius = r0;
    f.torus_height = z0;
    f.width = delta;
    f.spinor = s;
    return f;
  }
  // (1 + |x|^2)^{-3/2} (I + i x.sigma) (1, 0)
  static SpinorField loss_yau_mode() {
    SpinorField f;
    f.kind = Kind::LossYauMode;
    return f;
  }

  // Axis-aligned box outside of which the field vanishes; only for compact kinds.
  bool compact() const { return kind == Kind::BumpBall || kind == Kind::BumpTorus; }
  std::pair<Vector3d, Vector3d> support_box() const {
    if (kind == Kind::BumpBall) {
      return {center - Vector3d::Constant(width), center + Vector3d::Constant(width)};
    }
    const double r = torus_radius + width;
    return {Vector3d(-r, -r, torus_height - width), Vector3d(r, r, torus_height + width)};
  }

  template <class T>
  Spinor<T> operator()(const Vec3<T>& x) const {
    const Spinor<T> s = Spinor<T>::from(spinor);
    switch (kind) {
      case Kind::Constant:
        return s;
      case Kind::PlaneWave: {
        const T phase = lift<T>(wavevector).dot(x);
        return cmul(cos(phase), sin(phase), s);
      }
      case Kind::Gaussian: {
        const Vec3<T> d = x - lift<T>(center);
        const T env = exp(T(-0.5 / (width * width)) * d.squaredNorm()) * (T(1.0) + lift<T>(modulation).dot(d));
        const T phase = lift<T>(wavevector).dot(x);
        return cmul(env * cos(phase), env * sin(phase), s);
      }
      case Kind::BumpBall: {
        const T q = (x - lift<T>(center)).squaredNorm() / T(width * width);
        if (!(primal(q) < 1.0)) return Spinor<T>{};
        return exp(T(-1.0) / (T(1.0) - q)) * s;
      }
      case Kind::BumpTorus: {
        const T r2 = x[0] * x[0] + x[1] * x[1];
        const double inner = torus_radius - width;
        if (!(primal(r2) > inner * inner)) return Spinor<T>{};
        const T dr = sqrt(r2) - T(torus_radius);
        const T dz = x[2] - T(torus_height);
        const T q = (dr * dr + dz * dz) / T(width * width);
        if (!(primal(q) < 1.0)) return Spinor<T>{};
        return exp(T(-1.0) / (T(1.0) - q)) * s;
      }
      case Kind::LossYauMode: {
        const T r2 = x.squaredNorm();
        const T amp = pow(T(1.0) + r2, -1.5);
        // (I + i x.sigma)(1, 0) = (1 + i x3, -x2 + i x1)
        Spinor<T> out;
        out.re << amp, -amp * x[1];
        out.im << amp * x[2], amp * x[0];
        return out;
      }
    }
    return Spinor<T>{};
  }
};

}  // namespace ckfz

#endif  // CKFZ_SPINOR_FIELD_HPP_
