#ifndef CKFZ_CURVE_HPP_
#define CKFZ_CURVE_HPP_

#include <optional>
#include <vector>

#include "ckfz/spinor.hpp"

namespace ckfz {

// Closed-form parametrisation that an integrated curve is known to follow.
struct AnalyticTag {
  enum class Kind { RoCircle, CrCurve, CrAxis };
  Kind kind = Kind::RoCircle;
  double mu = 0.0;     // CrCurve, CrAxis
  double rho = 0.0;    // RoCircle: radius; CrCurve: |z - mu| / |z + mu|
  double theta = 0.0;  // CrCurve: azimuth of the plane containing the curve
  double phase = 0.0;  // RoCircle: polar angle at t = 0; CrCurve: arg (z - mu)/(z + mu) at t = 0
  double x3 = 0.0;     // RoCircle: height; CrAxis: x3 at t = 0
};

struct CurveSample {
  double t = 0.0;
  Vector3d x = Vector3d::Zero();
};

struct CurveTrace {
  std::vector<CurveSample> samples;
  bool closed = false;
  double period = 0.0;
  Vector3d plane_normal = Vector3d::Zero();
  std::optional<AnalyticTag> analytic_tag;
};

}  // namespace ckfz

#endif  // CKFZ_CURVE_HPP_
