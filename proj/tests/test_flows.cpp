#include <cmath>
#include <numbers>

#include "ckfz/error.hpp"
#include "ckfz/flows.hpp"
#include "doctest.h"

using namespace ckfz;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorKind error_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("rotation orbits close with period 2 pi") {
  for (double rho : {0.1, 1.0, 10.0}) {
    const CurveTrace tr = integrate_curve(ro_field(), Vector3d(rho, 0, 0.4), 20.0, 1e-11);
    REQUIRE(tr.closed);
    CHECK(std::abs(tr.period - 2 * kPi) < 1e-8);
    REQUIRE(tr.analytic_tag);
    CHECK(tr.analytic_tag->kind == AnalyticTag::Kind::RoCircle);
    CHECK((tr.plane_normal - Vector3d::UnitZ()).norm() < 1e-15);

    const LoopIntegrals li = loop_integrals(tr, ro_field());
    CHECK(std::abs(li.int_absY - 4 * kPi) < 1e-10);
    CHECK(std::abs(li.int_div) < 1e-12);
    CHECK(!li.int_flux);

    const PlanarityCurvature pc = planarity_and_curvature(tr, ro_field());
    CHECK(pc.max_plane_dev < 1e-10 * (1 + rho));
    CHECK(pc.max_curvature_residual < 1e-9);
    CHECK(pc.fit_normal_angle < 1e-8);
  }
}

TEST_CASE("special-field orbits close with period 2 pi / mu") {
  for (double mu : {0.5, 1.0, 2.0}) {
    for (double rho : {0.1, 0.5, 0.9}) {
      const Vector3d x0 = cr_curve_point(mu, rho, 0.0, 0.0);
      const CurveTrace tr = integrate_curve(cr_field(mu), x0, 4 * kPi / mu, 1e-11);
      REQUIRE(tr.closed);
      CHECK(std::abs(tr.period - 2 * kPi / mu) < 1e-8);
      REQUIRE(tr.analytic_tag);
      CHECK(tr.analytic_tag->kind == AnalyticTag::Kind::CrCurve);
      CHECK(tr.analytic_tag->rho == doctest::Approx(rho).epsilon(1e-12));

      // Closed-form parametrisation, pointwise.
      double worst = 0;
      for (const CurveSample& s : tr.samples) {
        worst = std::max(worst, (s.x - cr_curve_point(mu, rho, 0.0, s.t)).norm() / (1 + s.x.norm()));
      }
      CHECK(worst < 1e-7);

      const LoopIntegrals li = loop_integrals(tr, cr_field(mu), PotentialSpec::hopf_base(mu));
      CHECK(std::abs(li.int_absY - 4 * kPi) < 1e-7);
      CHECK(std::abs(li.int_div) < 1e-7);
      CHECK(std::abs(*li.int_flux) < 1e-8);
    }
  }
}

TEST_CASE("worked loop-integral and planarity examples") {
  const Vector3d x0 = cr_curve_point(1.0, 0.5, 0.0, 0.0);
  const CurveTrace tr = integrate_curve(cr_field(1.0), x0, 10.0, 1e-10);
  REQUIRE(tr.closed);
  const LoopIntegrals li = loop_integrals(tr, cr_field(1.0), PotentialSpec::hopf_base(1.0));
  CHECK(std::abs(li.int_div) <= 1e-8);
  CHECK(std::abs(li.int_absY - 4 * kPi) <= 1e-8);
  CHECK(std::abs(*li.int_flux) <= 1e-8);
  CHECK(planarity_and_curvature(tr, cr_field(1.0)).max_curvature_residual < 1e-7);

  // rho = 0.3 in the plane at azimuth pi/4.
  const Vector3d y0 = cr_curve_point(1.0, 0.3, kPi / 4, 0.0);
  const CurveTrace tq = integrate_curve(cr_field(1.0), y0, 10.0, 1e-10);
  REQUIRE(tq.closed);
  CHECK(std::abs(tq.plane_normal.dot(Vector3d::UnitZ())) < 1e-12);
  const PlanarityCurvature pc = planarity_and_curvature(tq, cr_field(1.0));
  CHECK(pc.max_plane_dev < 1e-8);
  CHECK(pc.max_curvature_residual < 1e-7);
  // The orbit plane contains the x3-axis.
  CHECK(std::abs(tq.plane_normal.dot(Vector3d(std::cos(kPi / 4), std::sin(kPi / 4), 0))) < 1e-12);
}

TEST_CASE("closed orbits of rigidly moved admissible fields") {
  // Special field with nu = 0.8 about a tilted axis through a shifted centre.
  CanonicalForm f;
  f.kind = CkfKind::Special;
  f.x0 = Vector3d(0.3, -0.2, 0.5);
  f.axis = Vector3d(1, 2, 2).normalized();
  f.scale = 1.7;
  f.nu = 0.8;
  const CkfParams p = reconstruct(f);
  const double period = 2 * kPi / (f.scale * std::sqrt(2 * f.nu));
  const CurveTrace tr = integrate_curve(p, f.x0 + Vector3d(0.4, 0.1, -0.3), 3 * period, 1e-11);
  REQUIRE(tr.closed);
  CHECK(!tr.analytic_tag);
  CHECK(std::abs(tr.period - period) < 1e-8);
  const LoopIntegrals li = loop_integrals(tr, p);
  CHECK(std::abs(li.int_absY - 4 * kPi) < 1e-7);
  CHECK(std::abs(li.int_div) < 1e-7);
  const PlanarityCurvature pc = planarity_and_curvature(tr, p);
  CHECK(pc.max_plane_dev < 1e-8);
  CHECK(pc.max_curvature_residual < 1e-7);
  CHECK(pc.fit_normal_angle < 1e-7);
}

TEST_CASE("period is stable under tolerance refinement") {
  for (double rk_tol : {1e-8, 1e-10}) {
    const Vector3d x0 = cr_curve_point(1.0, 0.7, 0.3, 0.0);
    const CurveTrace a = integrate_curve(cr_field(1.0), x0, 10.0, rk_tol);
    const CurveTrace b = integrate_curve(cr_field(1.0), x0, 10.0, rk_tol / 100);
    REQUIRE(a.closed);
    REQUIRE(b.closed);
    CHECK(std::abs(a.period - b.period) < 10 * rk_tol);
  }
}

TEST_CASE("axis orbits and inadmissible fields") {
  CHECK(error_of([] { integrate_curve(cr_field(1.0), Vector3d(0, 0, 0.1), 10.0, 1e-10); }) == ErrorKind::BlowUp);
  const CkfParams dilation{Vector3d(1, 0, 0), 2.0, Vector3d::Zero(), Vector3d::Zero()};
  CHECK(error_of([&] { integrate_curve(dilation, Vector3d(1, 1, 1), 1.0, 1e-10); }) == ErrorKind::NotAdmissible);
  const CkfParams generic{Vector3d(1, 0, 0), 0.0, Vector3d(1, 0, 0), Vector3d::Zero()};
  CHECK(error_of([&] { integrate_curve(generic, Vector3d(1, 1, 1), 1.0, 1e-10); }) == ErrorKind::NotAdmissible);
  CHECK(error_of([] { integrate_curve(ro_field(), Vector3d(0, 0, 1), 1.0, 1e-10); }) == ErrorKind::FrameUndefined);

  // A translation orbit never closes.
  const CurveTrace line = integrate_curve(ud_field(), Vector3d(0, 0, 0), 5.0, 1e-10);
  CHECK(!line.closed);
  CHECK(line.samples.back().t == doctest::Approx(5.0));
  CHECK((line.samples.back().x - Vector3d(0, 0, 5)).norm() < 1e-9);
  CHECK(error_of([&] { loop_integrals(line, ud_field()); }) == ErrorKind::NotClosed);
  CHECK(error_of([&] { planarity_and_curvature(line, ud_field()); }) == ErrorKind::NotClosed);
}

TEST_CASE("axis orbit follows the tangent law until escape") {
  // x3(t) = mu tan(mu t / 2 + atan(x3(0) / mu)); blow-up time for x3(0) = 0.1, mu = 1.
  const double blow = 2 * (kPi / 2 - std::atan(0.1));
  const CurveTrace tr = integrate_curve(cr_field(1.0), Vector3d(0, 0, 0.1), 0.9 * blow, 1e-11);
  REQUIRE(tr.analytic_tag);
  CHECK(tr.analytic_tag->kind == AnalyticTag::Kind::CrAxis);
  for (const CurveSample& s : tr.samples) {
    const Vector3d expect = analytic_point(*tr.analytic_tag, s.t);
    CHECK((s.x - expect).norm() < 1e-8 * (1 + expect.norm()));
  }
}

TEST_CASE("f w^3 along an integrated special-field orbit") {
  const CurveTrace tr = integrate_curve(cr_field(1.0), cr_curve_point(1.0, 0.5, 0.0, 0.0), 10.0, 1e-10);
  REQUIRE(tr.closed);
  const Fw3Result r = fw3_along_curve(PotentialSpec::hopf_base(1.0), tr);
  CHECK(r.spread < 1e-8);
}
