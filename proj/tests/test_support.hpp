#ifndef CKFZ_TESTS_TEST_SUPPORT_HPP_
#define CKFZ_TESTS_TEST_SUPPORT_HPP_

#include <random>

#include <Eigen/Geometry>

#include "ckfz/ckf.hpp"

namespace ckfz::testing {

inline Vector3d random_vector(std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  return Vector3d(u(rng), u(rng), u(rng));
}

inline CkfParams random_ckf(std::mt19937_64& rng) { return ckfz::random_ckf(rng); }

inline Mat3<double> random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q.toRotationMatrix();
}

// Simple-rotation fields drawn from canonical data, cycling through the four kinds.
inline CkfParams random_simple_rotation(std::mt19937_64& rng, int kind) {
  static constexpr CkfKind kKinds[] = {CkfKind::Translation, CkfKind::Dilation, CkfKind::Rotation, CkfKind::Special};
  return ckfz::random_simple_rotation(rng, kKinds[kind % 4]);
}

}  // namespace ckfz::testing

#endif  // CKFZ_TESTS_TEST_SUPPORT_HPP_
