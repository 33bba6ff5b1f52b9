#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Eigenvalues>

#include "ckfz/dirac_grid.hpp"
#include "ckfz/error.hpp"
#include "doctest.h"
#include "holonomy_cases.hpp"

using namespace ckfz;

namespace {

constexpr double kPi = std::numbers::pi;
using Complex = std::complex<double>;

ErrorKind error_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::InvalidArgument;
}

GridSpec grid(int n, double L, int stencil = 4) {
  GridSpec g;
  g.n = n;
  g.L = L;
  g.stencil = stencil;
  return g;
}

Eigen::VectorXd dense_eigenvalues(const GridOperator& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(CMatrix(m.matrix), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double max_entry_difference(const SparseC& a, const SparseC& b) {
  const SparseC d = a - b;
  double worst = 0.0;
  for (Eigen::Index r = 0; r < d.outerSize(); ++r) {
    for (SparseC::InnerIterator it(d, r); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  return worst;
}

}  // namespace

TEST_CASE("grid validation") {
  CHECK(error_of([] { grid(6, 1.0).validate(); }) == ErrorKind::InvalidArgument);
  CHECK(error_of([] { grid(9, 1.0).validate(); }) == ErrorKind::InvalidArgument);
  CHECK(error_of([] { grid(8, 0.0).validate(); }) == ErrorKind::InvalidArgument);
  CHECK(error_of([] { grid(8, 1.0, 3).validate(); }) == ErrorKind::InvalidArgument);
  GridSpec big = grid(64, 1.0);
  big.max_dimension = 100000;
  CHECK(error_of([&] { assemble(PotentialSpec::zero(), big); }) == ErrorKind::OutOfMemory);
  CHECK(grid(16, 6.0).h() == doctest::Approx(0.8));
  CHECK(error_of([] { sigma_min_dense(assemble(PotentialSpec::zero(), grid(14, 1.0))); }) ==
        ErrorKind::OutOfMemory);
}

TEST_CASE("assembled operators are exactly Hermitian") {
  const std::vector<PotentialSpec> specs = {
      PotentialSpec::zero(),
      PotentialSpec::loss_yau(),
      ckfz::testing::ro_bump_potential().scaled(7.0),
      ckfz::testing::cr_modulated_potential(1.0),
      PotentialSpec::gauge_shift(PotentialSpec::hopf_base(1.0), PotentialSpec::Gauge::SinX1TimesX2),
  };
  for (int stencil : {2, 4}) {
    for (const PotentialSpec& s : specs) {
      const GridOperator m = assemble(s, grid(10, 2.5, stencil));
      CHECK(m.dimension() == 2000);
      CHECK(hermiticity_defect(m) == 0.0);
    }
  }
}

TEST_CASE("free spectrum matches the discrete modes") {
  const int n = 8;
  const GridSpec g = grid(n, 2.0, 2);
  const double h = g.h();
  std::vector<double> analytic;
  for (int a = 1; a <= n; ++a) {
    for (int b = 1; b <= n; ++b) {
      for (int c = 1; c <= n; ++c) {
        // tridiag(-1, 0, 1) / 2h has eigenvalues i cos(m pi / (n + 1)) / h.
        const double s = std::pow(std::cos(a * kPi / (n + 1)), 2) + std::pow(std::cos(b * kPi / (n + 1)), 2) +
                         std::pow(std::cos(c * kPi / (n + 1)), 2);
        analytic.push_back(s / (h * h));
        analytic.push_back(s / (h * h));
      }
    }
  }
  std::sort(analytic.begin(), analytic.end());
  Eigen::VectorXd sq = dense_eigenvalues(assemble(PotentialSpec::zero(), g)).array().square();
  std::sort(sq.data(), sq.data() + sq.size());
  REQUIRE(sq.size() == static_cast<Eigen::Index>(analytic.size()));
  double worst = 0.0;
  for (Eigen::Index i = 0; i < sq.size(); ++i) worst = std::max(worst, std::abs(sq(i) - analytic[i]));
  CHECK(worst < 1e-11 / (h * h));
  CHECK(sq.minCoeff() >= 0.0);
  CHECK(sq.maxCoeff() <= 12.0 / (h * h) * (1 + 1e-12));
}

TEST_CASE("free sigma_min") {
  SUBCASE("closed form for the second-order stencil") {
    for (int n : {8, 16, 24}) {
      const GridSpec g = grid(n, 4.0, 2);
      const double expected = std::sqrt(3.0) * std::sin(kPi / (2 * (n + 1))) / g.h();
      CHECK(free_sigma_min(g) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
  SUBCASE("iterative solver at A = 0, n = 16, L = 4") {
    for (int stencil : {2, 4}) {
      const GridSpec g = grid(16, 4.0, stencil);
      const SigmaMinResult r = sigma_min(assemble(PotentialSpec::zero(), g));
      CHECK(r.converged);
      CHECK(r.sigma_min == doctest::Approx(free_sigma_min(g)).epsilon(1e-6));
    }
    // The even and odd sublattices decouple, each a chain with a wall one spacing
    // past one end: the continuum limit is the quarter-wave mode of side (n + 1) h.
    const GridSpec g = grid(16, 4.0, 2);
    const double x = kPi / (2 * (16 + 1));
    const double continuum = std::sqrt(3.0) * x / g.h();
    CHECK(std::abs(free_sigma_min(g) - continuum) / continuum <= x * x / 6.0);
  }
}

TEST_CASE("iterative and dense sigma_min agree at n = 8") {
  const std::vector<PotentialSpec> specs = {PotentialSpec::loss_yau(), ckfz::testing::cr_modulated_potential(1.0),
                                            ckfz::testing::ro_bump_potential().scaled(5.0)};
  for (int stencil : {2, 4}) {
    for (const PotentialSpec& s : specs) {
      const GridOperator m = assemble(s, grid(8, 2.0, stencil));
      SigmaOptions opt;
      opt.tol = 1e-12;
      const SigmaMinResult r = sigma_min(m, opt);
      CHECK(std::abs(r.sigma_min - sigma_min_dense(m)) < 1e-8);
    }
  }
}

TEST_CASE("planted null vector") {
  const GridOperator m = assemble(PotentialSpec::loss_yau(), grid(12, 3.0));
  CVector v = CVector::Random(m.dimension());
  v.normalize();
  // (I - v v*) M (I - v v*) annihilates v.
  LinearMap planted = [&](const CMatrix& in, CMatrix& out) {
    CMatrix p = in - v * (v.adjoint() * in);
    CMatrix mp;
    m.apply(p, mp);
    out = mp - v * (v.adjoint() * mp);
  };
  LinearMap square = [&](const CMatrix& in, CMatrix& out) {
    CMatrix tmp;
    planted(in, tmp);
    planted(tmp, out);
  };
  LobpcgOptions opt;
  opt.tol = 1e-6;
  opt.abs_floor = 1e-6 * std::pow(free_sigma_min(m.grid), 2);
  const LobpcgResult r = lobpcg_smallest(square, m.dimension(), free_preconditioner(m.grid, 0.1), opt);
  CHECK(r.converged);
  CHECK(std::sqrt(r.eigenvalue) < 1e-6);
  CHECK(std::abs(std::abs(r.vector.dot(v)) - 1.0) < 1e-6);
}

TEST_CASE("periodic plane waves reproduce the stencil symbol") {
  for (int stencil : {2, 4}) {
    GridSpec g = grid(12, 3.0, stencil);
    g.boundary = GridSpec::Boundary::Periodic;
    const double h = g.h();
    const GridOperator m = assemble(PotentialSpec::zero(), g);
    const Vector3d k = 2 * kPi / (g.n * h) * Vector3d(1, 2, -3);
    const Spinor2 s(Complex(0.6, 0.1), Complex(-0.2, 0.7));
    const CVector f = sample_on_grid(SpinorField::plane_wave(k, s), g);
    CMatrix mf;
    m.apply(CMatrix(f), mf);
    Vector3d symbol;
    for (int j = 0; j < 3; ++j) {
      const double kh = k[j] * h;
      symbol[j] = stencil == 2 ? std::sin(kh) / h : (8 * std::sin(kh) - std::sin(2 * kh)) / (6 * h);
    }
    const CVector expected = sample_on_grid(SpinorField::plane_wave(k, sigma_dot(symbol) * s), g);
    CHECK((mf.col(0) - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("lattice gauge covariance") {
  const GridSpec g = grid(10, 2.5);
  const Vector3d k(0.7, -1.3, 0.4);
  CVector phase(g.dimension());
  for (int c = 0; c < g.n; ++c) {
    for (int b = 0; b < g.n; ++b) {
      for (int a = 0; a < g.n; ++a) {
        const long s = a + g.n * (b + static_cast<long>(g.n) * c);
        const Complex e = std::polar(1.0, k.dot(g.node(a, b, c)));
        phase(2 * s) = phase(2 * s + 1) = e;
      }
    }
  }
  for (const PotentialSpec& base :
       {PotentialSpec::loss_yau(), ckfz::testing::ro_bump_potential(), ckfz::testing::cr_modulated_potential(1.0)}) {
    const SparseC m = assemble(base, g).matrix;
    const SparseC shifted =
        assemble(PotentialSpec::gauge_shift(base, PotentialSpec::Gauge::Linear, k), g).matrix;
    // A + grad g with g = k.x gives G M G^* with G = diag(e^{i g}).
    const SparseC conj = phase.asDiagonal() * m * phase.conjugate().asDiagonal();
    CHECK(max_entry_difference(shifted, conj) < 1e-12);
  }

  // A constant potential is a pure gauge: the spectrum is the free one.
  const GridSpec small = grid(8, 2.0);
  const Eigen::VectorXd free = dense_eigenvalues(assemble(PotentialSpec::zero(), small));
  const Eigen::VectorXd shifted =
      dense_eigenvalues(assemble(PotentialSpec::gauge_shift(PotentialSpec::zero(), PotentialSpec::Gauge::Linear, k), small));
  CHECK((free - shifted).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("zero-mode residual on the grid") {
  SUBCASE("truncation order of the Loss-Yau mode") {
    for (int stencil : {2, 4}) {
      const double r16 = zeromode_residual_on_grid(PotentialSpec::loss_yau(), SpinorField::loss_yau_mode(),
                                                   grid(16, 1.5, stencil));
      const double r32 = zeromode_residual_on_grid(PotentialSpec::loss_yau(), SpinorField::loss_yau_mode(),
                                                   grid(32, 1.5, stencil));
      const double target = std::pow(2.0, -stencil);
      CHECK(r32 / r16 == doctest::Approx(target).epsilon(0.3));
    }
  }
  SUBCASE("exact discrete null vectors") {
    const Spinor2 s(Complex(0.3, -0.2), Complex(1.0, 0.5));
    CHECK(zeromode_residual_on_grid(PotentialSpec::zero(), SpinorField::constant(s), grid(12, 2.0)) < 1e-12);
    // A = k is the gauge of k.x, so e^{i k.x} s is annihilated hop by hop.
    const Vector3d k(0.4, -0.9, 1.2);
    const PotentialSpec constant = PotentialSpec::gauge_shift(PotentialSpec::zero(), PotentialSpec::Gauge::Linear, k);
    CHECK(zeromode_residual_on_grid(constant, SpinorField::plane_wave(k, s), grid(12, 2.0)) < 1e-12);
  }
  SUBCASE("wrong field") {
    const double r = zeromode_residual_on_grid(ckfz::testing::ro_bump_potential(), SpinorField::loss_yau_mode(),
                                               grid(16, 1.5));
    CHECK(r > 0.3);
  }
  SUBCASE("agrees with the assembled matrix for fields supported inside the box") {
    const GridSpec g = grid(14, 2.0);
    const SpinorField f = SpinorField::bump_ball(Vector3d(0.1, -0.2, 0.15), 1.2, Spinor2(1.0, Complex(0, 1)));
    const CVector v = sample_on_grid(f, g);
    CMatrix mv;
    const PotentialSpec spec = PotentialSpec::loss_yau();
    assemble(spec, g).apply(CMatrix(v), mv);
    CHECK(zeromode_residual_on_grid(spec, f, g) == doctest::Approx(mv.norm() / v.norm()).epsilon(1e-12));
  }
}

TEST_CASE("scaling sweeps") {
  const GridSpec g = grid(10, 3.0);
  const SweepResult r = scaling_sweep(ckfz::testing::ro_bump_potential(), g, {0.0, 1.0, 2.0});
  REQUIRE(r.ts.size() == 3);
  REQUIRE(r.sigma_mins.size() == 3);
  CHECK(r.potential == "axial");
  CHECK(r.sigma_mins[0] == doctest::Approx(free_sigma_min(g)).epsilon(1e-6));
  for (double s : r.sigma_mins) CHECK(s >= 0.0);
  CHECK(error_of([&] { scaling_sweep(PotentialSpec::loss_yau(), g, {std::nan("")}); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("reproducibility") {
  const GridOperator m = assemble(PotentialSpec::loss_yau(), grid(12, 4.0));
  SigmaOptions one;
  SigmaOptions two = one;
  two.threads = 2;
  const SigmaMinResult a = sigma_min(m, one);
  const SigmaMinResult b = sigma_min(m, one);
  const SigmaMinResult c = sigma_min(m, two);
  CHECK(a.sigma_min == b.sigma_min);
  CHECK(a.sigma_min == c.sigma_min);
  CHECK(a.iterations == c.iterations);
}

TEST_CASE("non-convergence is reported") {
  const GridOperator m = assemble(PotentialSpec::loss_yau(), grid(10, 4.0));
  SigmaOptions opt;
  opt.max_iterations = 2;
  opt.precondition = false;
  CHECK(error_of([&] { sigma_min(m, opt); }) == ErrorKind::NoConvergence);
  opt.require_convergence = false;
  const SigmaMinResult r = sigma_min(m, opt);
  CHECK(!r.converged);
  CHECK(r.iterations == 2);
}
