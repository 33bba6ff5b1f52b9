#ifndef CKFZ_DIRAC_GRID_HPP_
#define CKFZ_DIRAC_GRID_HPP_

// Finite-difference Weyl-Dirac operator on the box [-L, L]^3.
//
// Unknowns live on the n^3 nodes x = -L + (i, j, k) h, h = 2L/(n - 1), ordered
// site-major (i fastest) with the two spinor components innermost. The derivative
// is a central difference of order 2 or 4 whose hops carry the Peierls phase
// exp(-i int A.dl) of the straight segment they span, so that
//
//   (M psi)(x) = sum_j sigma_j sum_m (-i c_m / h) [U(x, x + m h e_j) psi(x + m h e_j) - U(x, x - m h e_j) psi(x - m h e_j)]
//
// is Hermitian entry by entry and covariant under lattice gauge transformations.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "ckfz/lobpcg.hpp"
#include "ckfz/potential.hpp"
#include "ckfz/spinor_field.hpp"

namespace ckfz {

struct GridSpec {
  enum class Boundary { Dirichlet, Periodic };

  double L = 6.0;
  int n = 24;
  int stencil = 4;  // 2 or 4
  Boundary boundary = Boundary::Dirichlet;
  // Largest admissible matrix dimension 2 n^3.
  long max_dimension = 2L * 160 * 160 * 160;

  double h() const { return 2.0 * L / (n - 1); }
  long dimension() const { return 2L * n * n * n; }
  Vector3d node(int i, int j, int k) const { return Vector3d(-L + i * h(), -L + j * h(), -L + k * h()); }
  // Throws InvalidArgument (n < 8, odd n, L <= 0, bad stencil) or OutOfMemory.
  void validate() const;
};

// Central-difference weights c_1, ..., c_{order/2}.
std::vector<double> stencil_weights(int order);

using SparseC = Eigen::SparseMatrix<std::complex<double>, Eigen::RowMajor, std::int64_t>;

struct GridOperator {
  GridSpec grid;
  SparseC matrix;

  Eigen::Index dimension() const { return matrix.rows(); }
  // out = M in; rows are split across threads.
  void apply(const CMatrix& in, CMatrix& out, int threads = 1) const;
};

GridOperator assemble(const PotentialSpec& spec, const GridSpec& g);

// max_ij |M_ij - conj(M_ji)|
double hermiticity_defect(const GridOperator& m);

// The 1-D derivative matrix (real, n x n) for the stencil and boundary of g.
Eigen::MatrixXd derivative_1d(const GridSpec& g);
// sigma_min of the free operator: sqrt(3 lambda_min(D1^T D1)).
double free_sigma_min(const GridSpec& g);
// Calibrated pass bar for the negative cases, half the free value.
inline double sigma_floor(const GridSpec& g) { return 0.5 * free_sigma_min(g); }

// (M0^2 + shift)^-1 for the free operator M0 on g, applied by diagonalising D1^T D1
// along each axis.
LinearMap free_preconditioner(const GridSpec& g, double shift);

struct SigmaOptions {
  double tol = 1e-6;  // relative tolerance on sigma_min
  int max_iterations = 4000;
  int block = 4;
  int threads = 1;
  bool precondition = true;
  std::uint64_t seed = 0x5eed;
  // When false a non-converged run is reported instead of thrown.
  bool require_convergence = true;
};

struct SigmaMinResult {
  double sigma_min = 0.0;
  double residual = 0.0;  // |M^2 v - sigma^2 v|
  int iterations = 0;
  bool converged = false;
  CVector vector;
  CMatrix block;
};

// sqrt(lambda_min(M^2)) by LOBPCG, preconditioned with (M0^2 + s)^-1 for the free
// operator M0, which is diagonalised axis by axis. Throws NoConvergence.
SigmaMinResult sigma_min(const GridOperator& m, const SigmaOptions& options = {},
                         const CMatrix* warm_start = nullptr);

// Dense reference for small grids (dimension <= 4096). Throws OutOfMemory above.
double sigma_min_dense(const GridOperator& m);

struct SweepResult {
  std::vector<double> ts;
  std::vector<double> sigma_mins;
  std::vector<int> iterations;
  std::vector<bool> converged;
  GridSpec grid;
  std::string potential;
};

// sigma_min(D[t A]) for each t; successive points are warm-started.
SweepResult scaling_sweep(const PotentialSpec& spec, const GridSpec& g, const std::vector<double>& ts,
                          const SigmaOptions& options = {});

// |M f| / |f| over the nodes, with the stencil reading f itself at nodes beyond the
// box instead of the Dirichlet zeros, so only the interior truncation error remains.
double zeromode_residual_on_grid(const PotentialSpec& spec, const SpinorField& mode, const GridSpec& g);

// The field sampled at the nodes in grid ordering.
CVector sample_on_grid(const SpinorField& f, const GridSpec& g);

}  // namespace ckfz

#endif  // CKFZ_DIRAC_GRID_HPP_
