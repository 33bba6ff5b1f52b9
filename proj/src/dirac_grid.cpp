#include "ckfz/dirac_grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <thread>

#include <Eigen/Eigenvalues>

#include "ckfz/error.hpp"
#include "ckfz/quadrature.hpp"

namespace ckfz {

namespace {

using Complex = std::complex<double>;
using Triplet = Eigen::Triplet<Complex, std::int64_t>;

// Entries of sigma_j as (row, col, value).
struct PauliEntry {
  int row, col;
  Complex value;
};

const std::array<std::array<PauliEntry, 2>, 3>& pauli_entries() {
  static const std::array<std::array<PauliEntry, 2>, 3> e = {{
      {{{0, 1, Complex(1, 0)}, {1, 0, Complex(1, 0)}}},
      {{{0, 1, Complex(0, -1)}, {1, 0, Complex(0, 1)}}},
      {{{0, 0, Complex(1, 0)}, {1, 1, Complex(-1, 0)}}},
  }};
  return e;
}

// exp(-i int_0^s A_j(x + u e_j) du) by 4-point Gauss-Legendre on the segment.
Complex link(const PotentialSpec& spec, const Vector3d& x, int j, double s) {
  static const Rule1d rule = gauss_legendre(4);
  double integral = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    Vector3d y = x;
    y[j] += 0.5 * s * (1.0 + rule.nodes[q]);
    integral += rule.weights[q] * eval_potential(spec, y)[j];
  }
  integral *= 0.5 * s;
  return std::polar(1.0, -integral);
}

long site_index(const GridSpec& g, int i, int j, int k) { return i + static_cast<long>(g.n) * (j + static_cast<long>(g.n) * k); }

// Index of the node m steps from idx along axis, or -1 when it falls outside a Dirichlet box.
int shifted(const GridSpec& g, int idx, int m) {
  const int t = idx + m;
  if (g.boundary == GridSpec::Boundary::Periodic) return ((t % g.n) + g.n) % g.n;
  return (t < 0 || t >= g.n) ? -1 : t;
}

void run_rows(Eigen::Index rows, int threads, const std::function<void(Eigen::Index, Eigen::Index)>& body) {
  const int nt = std::max(1, std::min<int>(threads, static_cast<int>(rows / 4096) + 1));
  if (nt == 1) {
    body(0, rows);
    return;
  }
  std::vector<std::thread> pool;
  const Eigen::Index chunk = (rows + nt - 1) / nt;
  for (int t = 0; t < nt; ++t) {
    const Eigen::Index r0 = t * chunk, r1 = std::min(rows, r0 + chunk);
    if (r0 < r1) pool.emplace_back(body, r0, r1);
  }
  for (auto& th : pool) th.join();
}

// (M0^2 + shift)^-1 with M0^2 = sum_j K_j (x) I_2 and K = D1^T D1 diagonalised once.
class FreePreconditioner {
 public:
  FreePreconditioner(const GridSpec& g, double shift) : n_(g.n), shift_(shift) {
    const Eigen::MatrixXd d = derivative_1d(g);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d.transpose() * d);
    v_ = es.eigenvectors().cast<Complex>();
    vt_ = v_.transpose();
    lambda_ = es.eigenvalues();
  }

  void operator()(const CMatrix& in, CMatrix& out) const {
    out = in;
    const long n = n_;
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
      Complex* data = out.col(c).data();
      transform(data, vt_, v_);
      for (long k = 0; k < n; ++k) {
        for (long j = 0; j < n; ++j) {
          for (long i = 0; i < n; ++i) {
            const double inv = 1.0 / (lambda_(i) + lambda_(j) + lambda_(k) + shift_);
            const long s = 2 * (i + n * (j + n * k));
            data[s] *= inv;
            data[s + 1] *= inv;
          }
        }
      }
      transform(data, v_, vt_);
    }
  }

 private:
  using Strided = Eigen::Map<CMatrix, 0, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>>;

  // Applies left (n x n) along the i axis and right-multiplies the j and k axes by
  // right, i.e. the same 1-D transform on every axis and spin component.
  void transform(Complex* data, const CMatrix& left, const CMatrix& right) const {
    const long n = n_;
    for (int spin = 0; spin < 2; ++spin) {
      Strided xi(data + spin, n, n * n, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>(2 * n, 2));
      xi = left * xi;
    }
    for (long k = 0; k < n; ++k) {
      Eigen::Map<CMatrix> xj(data + 2 * n * n * k, 2 * n, n);
      xj = xj * right;
    }
    Eigen::Map<CMatrix> xk(data, 2 * n * n, n);
    xk = xk * right;
  }

  int n_;
  CMatrix v_, vt_;
  Eigen::VectorXd lambda_;
  double shift_;
};

}  // namespace

LinearMap free_preconditioner(const GridSpec& g, double shift) {
  auto pc = std::make_shared<const FreePreconditioner>(g, shift);
  return [pc](const CMatrix& in, CMatrix& out) { (*pc)(in, out); };
}

void GridSpec::validate() const {
  if (n < 8) throw Error(ErrorKind::InvalidArgument, "grid needs n >= 8");
  // The 1-D difference matrix is real antisymmetric, hence singular for odd n.
  if (n % 2 != 0) throw Error(ErrorKind::InvalidArgument, "grid needs even n");
  if (!(L > 0.0) || !std::isfinite(L)) throw Error(ErrorKind::InvalidArgument, "grid needs L > 0");
  if (stencil != 2 && stencil != 4) throw Error(ErrorKind::InvalidArgument, "stencil order must be 2 or 4");
  if (dimension() > max_dimension) {
    throw Error(ErrorKind::OutOfMemory, "2 n^3 = " + std::to_string(dimension()) + " exceeds the cap of " +
                                            std::to_string(max_dimension) + "; lower n or raise max_dimension");
  }
}

std::vector<double> stencil_weights(int order) {
  if (order == 2) return {0.5};
  if (order == 4) return {2.0 / 3.0, -1.0 / 12.0};
  throw Error(ErrorKind::InvalidArgument, "stencil order must be 2 or 4");
}

void GridOperator::apply(const CMatrix& in, CMatrix& out, int threads) const {
  out.resize(matrix.rows(), in.cols());
  run_rows(matrix.rows(), threads, [&](Eigen::Index r0, Eigen::Index r1) {
    out.middleRows(r0, r1 - r0).noalias() = matrix.middleRows(r0, r1 - r0) * in;
  });
}

GridOperator assemble(const PotentialSpec& spec, const GridSpec& g) {
  g.validate();
  const std::vector<double> c = stencil_weights(g.stencil);
  const double h = g.h();
  const bool zero_potential = spec.kind == PotentialSpec::Kind::Zero || spec.scale == 0.0;
  const auto& sig = pauli_entries();

  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(g.dimension()) * 4 * c.size() * 2);
  for (int k = 0; k < g.n; ++k) {
    for (int j = 0; j < g.n; ++j) {
      for (int i = 0; i < g.n; ++i) {
        const int idx[3] = {i, j, k};
        const long x = site_index(g, i, j, k);
        const Vector3d pos = g.node(i, j, k);
        for (int axis = 0; axis < 3; ++axis) {
          for (std::size_t m = 1; m <= c.size(); ++m) {
            const int t = shifted(g, idx[axis], static_cast<int>(m));
            if (t < 0) continue;
            int jdx[3] = {i, j, k};
            jdx[axis] = t;
            const long y = site_index(g, jdx[0], jdx[1], jdx[2]);
            const Complex u = zero_potential ? Complex(1.0, 0.0) : link(spec, pos, axis, m * h);
            const Complex a = Complex(0.0, -c[m - 1] / h) * u;
            for (const PauliEntry& e : sig[axis]) {
              triplets.emplace_back(2 * x + e.row, 2 * y + e.col, e.value * a);
              // Hermitian partner; sigma_j is Hermitian so the block is sigma_j conj(a).
              triplets.emplace_back(2 * y + e.col, 2 * x + e.row, std::conj(e.value * a));
            }
          }
        }
      }
    }
  }
  GridOperator op;
  op.grid = g;
  op.matrix.resize(g.dimension(), g.dimension());
  op.matrix.setFromTriplets(triplets.begin(), triplets.end());
  op.matrix.makeCompressed();
  return op;
}

double hermiticity_defect(const GridOperator& m) {
  const SparseC adj = m.matrix.adjoint();
  const SparseC diff = m.matrix - adj;
  double worst = 0.0;
  for (Eigen::Index r = 0; r < diff.outerSize(); ++r) {
    for (SparseC::InnerIterator it(diff, r); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  return worst;
}

Eigen::MatrixXd derivative_1d(const GridSpec& g) {
  const std::vector<double> c = stencil_weights(g.stencil);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(g.n, g.n);
  for (int i = 0; i < g.n; ++i) {
    for (std::size_t m = 1; m <= c.size(); ++m) {
      const int fwd = shifted(g, i, static_cast<int>(m));
      const int bwd = shifted(g, i, -static_cast<int>(m));
      if (fwd >= 0) d(i, fwd) += c[m - 1] / g.h();
      if (bwd >= 0) d(i, bwd) -= c[m - 1] / g.h();
    }
  }
  return d;
}

double free_sigma_min(const GridSpec& g) {
  g.validate();
  const Eigen::MatrixXd d = derivative_1d(g);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d.transpose() * d, Eigen::EigenvaluesOnly);
  return std::sqrt(3.0 * std::max(0.0, es.eigenvalues().minCoeff()));
}

SigmaMinResult sigma_min(const GridOperator& m, const SigmaOptions& options, const CMatrix* warm_start) {
  const int threads = options.threads;
  LinearMap square = [&m, threads](const CMatrix& in, CMatrix& out) {
    CMatrix tmp;
    m.apply(in, tmp, threads);
    m.apply(tmp, out, threads);
  };
  const double free = free_sigma_min(m.grid);
  LinearMap precond;
  if (options.precondition) precond = free_preconditioner(m.grid, free * free);
  LobpcgOptions lo;
  lo.block = options.block;
  lo.max_iterations = options.max_iterations;
  lo.tol = options.tol;
  lo.abs_floor = options.tol * std::max(free * free, 1.0 / (m.grid.h() * m.grid.h() * m.grid.n * m.grid.n));
  lo.seed = options.seed;
  const LobpcgResult r = lobpcg_smallest(square, m.dimension(), precond, lo, warm_start);

  SigmaMinResult out;
  out.sigma_min = std::sqrt(r.eigenvalue);
  out.residual = r.residual;
  out.iterations = r.iterations;
  out.converged = r.converged;
  out.vector = r.vector;
  out.block = r.block;
  if (!r.converged && options.require_convergence) {
    throw Error(ErrorKind::NoConvergence, "LOBPCG stopped after " + std::to_string(r.iterations) +
                                              " iterations with residual " + std::to_string(r.residual) +
                                              " at lambda = " + std::to_string(r.eigenvalue));
  }
  return out;
}

double sigma_min_dense(const GridOperator& m) {
  if (m.dimension() > 4096) throw Error(ErrorKind::OutOfMemory, "dense reference limited to dimension 4096");
  const CMatrix dense = CMatrix(m.matrix);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(dense, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().minCoeff();
}

SweepResult scaling_sweep(const PotentialSpec& spec, const GridSpec& g, const std::vector<double>& ts,
                          const SigmaOptions& options) {
  SweepResult out;
  out.grid = g;
  out.potential = to_string(spec.kind);
  CMatrix warm;
  for (double t : ts) {
    if (!std::isfinite(t)) throw Error(ErrorKind::InvalidArgument, "scaling must be finite");
    const GridOperator m = assemble(spec.scaled(t), g);
    const SigmaMinResult r = sigma_min(m, options, warm.size() > 0 ? &warm : nullptr);
    warm = r.block;
    out.ts.push_back(t);
    out.sigma_mins.push_back(r.sigma_min);
    out.iterations.push_back(r.iterations);
    out.converged.push_back(r.converged);
  }
  return out;
}

CVector sample_on_grid(const SpinorField& f, const GridSpec& g) {
  CVector v(g.dimension());
  for (int k = 0; k < g.n; ++k) {
    for (int j = 0; j < g.n; ++j) {
      for (int i = 0; i < g.n; ++i) {
        const long s = site_index(g, i, j, k);
        v.segment<2>(2 * s) = to_complex(f(g.node(i, j, k)));
      }
    }
  }
  return v;
}

double zeromode_residual_on_grid(const PotentialSpec& spec, const SpinorField& mode, const GridSpec& g) {
  g.validate();
  const std::vector<double> c = stencil_weights(g.stencil);
  const double h = g.h();
  double num = 0.0, den = 0.0;
  for (int k = 0; k < g.n; ++k) {
    for (int j = 0; j < g.n; ++j) {
      for (int i = 0; i < g.n; ++i) {
        const Vector3d x = g.node(i, j, k);
        const Spinor2 fx = to_complex(mode(x));
        Spinor2 out = Spinor2::Zero();
        for (int axis = 0; axis < 3; ++axis) {
          Spinor2 diff = Spinor2::Zero();
          for (std::size_t m = 1; m <= c.size(); ++m) {
            const double s = m * h;
            Vector3d xf = x, xb = x;
            xf[axis] += s;
            xb[axis] -= s;
            diff += c[m - 1] * (link(spec, x, axis, s) * to_complex(mode(xf)) -
                                link(spec, x, axis, -s) * to_complex(mode(xb)));
          }
          out += Complex(0.0, -1.0 / h) * (pauli_matrix(axis) * diff);
        }
        num += out.squaredNorm();
        den += fx.squaredNorm();
      }
    }
  }
  return std::sqrt(num / den);
}

}  // namespace ckfz
