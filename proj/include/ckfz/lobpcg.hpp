#ifndef CKFZ_LOBPCG_HPP_
#define CKFZ_LOBPCG_HPP_

// Block locally optimal preconditioned conjugate gradient for the smallest
// eigenvalue of a Hermitian positive semidefinite operator given only by its action.

#include <cstdint>
#include <functional>

#include <Eigen/Core>

namespace ckfz {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
// out = Op(in), column by column; out is resized by the callee.
using LinearMap = std::function<void(const CMatrix& in, CMatrix& out)>;

struct LobpcgOptions {
  int block = 4;
  int max_iterations = 4000;
  // Converged when the error bound min(|r|, |r|^2 / gap) on the lowest Ritz value is
  // at most tol max(theta, abs_floor), r = A x - theta x.
  double tol = 1e-8;
  double abs_floor = 0.0;
  std::uint64_t seed = 0x10bc9;
  // Every this many iterations the block is re-orthonormalised and A X recomputed.
  int refresh = 25;
};

struct LobpcgResult {
  double eigenvalue = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  CVector vector;
  // Remaining Ritz block, usable as a warm start.
  CMatrix block;
};

// precond may be empty. initial, when given with matching rows, seeds the block.
LobpcgResult lobpcg_smallest(const LinearMap& op, Eigen::Index dim, const LinearMap& precond,
                             const LobpcgOptions& options, const CMatrix* initial = nullptr);

}  // namespace ckfz

#endif  // CKFZ_LOBPCG_HPP_
