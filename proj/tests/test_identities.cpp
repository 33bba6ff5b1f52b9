#include <cmath>
#include <random>
#include <set>

#include "doctest.h"

#include "ckfz/error.hpp"
#include "ckfz/identities.hpp"
#include "test_support.hpp"

using namespace ckfz;

TEST_CASE("grad_w2 on the special field against finite differences") {
  const CkfParams p = cr_field(1.0);
  const Vector3d x(0.3, -0.2, 0.7);
  const IdentityReport r = check_identity("grad_w2", p, x);
  CHECK(r.residual < 1e-12);
  CHECK(r.pass);

  // Independent oracle: central differences of w^2 against the right-hand side.
  const double h = 1e-5;
  Vector3d fd;
  for (int i = 0; i < 3; ++i) {
    const Vector3d e = h * Vector3d::Unit(i);
    fd[i] = (eval_ckf(p, Vector3d(x + e)).squaredNorm() - eval_ckf(p, Vector3d(x - e)).squaredNorm()) / (2 * h);
  }
  const Vector3d X = eval_ckf(p, x);
  const Vector3d rhs = 2.0 / 3.0 * div_ckf(p, x) * X + X.cross(curl_ckf(p, x));
  CHECK((fd - rhs).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("exact zeros on the canonical fields") {
  CHECK(check_identity("XdotY_zero", ro_field(), Vector3d(0.4, -1.1, 3)).residual == 0.0);
  CHECK(check_identity("grad_w_norm_simple", ud_field(), Vector3d(-0.5, 0.25, 1)).residual == 0.0);
}

TEST_CASE("unknown identity and undefined frame") {
  CHECK_THROWS_AS(check_identity("no_such_identity", ro_field(), Vector3d(1, 0, 0)), Error);
  try {
    check_identity("frame_orthonormal", ud_field(), Vector3d(1, 0, 0));
    FAIL("expected FrameUndefined");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::FrameUndefined);
  }
  try {
    check_identity("Xxgrad_w", ro_field(), Vector3d(0, 0, 1));
    FAIL("expected FrameUndefined");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::FrameUndefined);
  }
}

TEST_CASE("suites on the canonical simple rotations pass everywhere") {
  for (const CkfParams& p : {ro_field(), cr_field(2.0)}) {
    const auto reports = run_identity_suite(p, 100, 7);
    std::set<std::string> ids;
    for (const auto& r : reports) {
      CHECK_MESSAGE(r.pass, r.identity_id << " residual " << r.residual);
      ids.insert(r.identity_id);
    }
    CHECK(ids.size() == identity_registry().size());
  }
}

TEST_CASE("a generic field passes every general identity and skips the rest") {
  std::mt19937_64 rng(99);
  const CkfParams p = testing::random_ckf(rng);
  REQUIRE(simple_rotation_residual(p).max_abs() > 1e-3);
  const auto reports = run_identity_suite(p, 100, 7);
  std::set<std::string> general;
  for (const auto& info : identity_registry())
    if (info.scope == IdentityScope::General) general.insert(info.id);
  for (const auto& r : reports) {
    CHECK(general.count(r.identity_id) == 1);
    CHECK_MESSAGE(r.pass, r.identity_id << " residual " << r.residual);
  }
  CHECK(reports.size() == 100 * general.size());
}

TEST_CASE("suite is deterministic in the seed") {
  const auto a = run_identity_suite(cr_field(1.0), 10, 42);
  const auto b = run_identity_suite(cr_field(1.0), 10, 42);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].point == b[i].point);
    CHECK(a[i].residual == b[i].residual);
  }
  CHECK_THROWS_AS(run_identity_suite(ro_field(), 0, 1), Error);
}

TEST_CASE("Pauli product and triple product") {
  std::mt19937_64 rng(1000);
  for (int k = 0; k < 1000; ++k) {
    const Vector3d a = testing::random_vector(rng), b = testing::random_vector(rng), c = testing::random_vector(rng);
    CHECK(pauli_product_residual(a, b) < 1e-13);
    CHECK(triple_product_residual(a, b, c) < 1e-13);
  }
}

TEST_CASE("random campaign over general and simple-rotation fields") {
  const IdentityCampaign c = identity_campaign(200, 200, 0xc0ffee);
  CHECK(c.failures == 0);
  CHECK(c.worst_residual <= kIdentityTol);
  CHECK(c.checks > 400 * 5);
  const IdentityCampaign again = identity_campaign(200, 200, 0xc0ffee);
  CHECK(again.checks == c.checks);
  CHECK(again.worst_residual == c.worst_residual);
}
