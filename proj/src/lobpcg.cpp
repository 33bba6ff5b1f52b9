#include "ckfz/lobpcg.hpp"

#include <algorithm>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace ckfz {

namespace {

using Complex = std::complex<double>;

CMatrix orthonormal(const CMatrix& x) {
  Eigen::HouseholderQR<CMatrix> qr(x);
  return qr.householderQ() * CMatrix::Identity(x.rows(), x.cols());
}

CMatrix hermitian_part(const CMatrix& a) { return 0.5 * (a + a.adjoint()); }

// Rotates (x, ax) onto the Ritz vectors of span x; returns the Ritz values.
Eigen::VectorXd rayleigh_ritz(CMatrix& x, CMatrix& ax) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(x.adjoint() * ax));
  x = x * es.eigenvectors();
  ax = ax * es.eigenvectors();
  return es.eigenvalues();
}

// Scales every column of s (and the matching column of as) to unit norm.
void normalize_columns(CMatrix& s, CMatrix& as) {
  for (Eigen::Index k = 0; k < s.cols(); ++k) {
    const double nk = s.col(k).norm();
    if (nk > 0.0) {
      s.col(k) /= nk;
      as.col(k) /= nk;
    }
  }
}

}  // namespace

LobpcgResult lobpcg_smallest(const LinearMap& op, Eigen::Index dim, const LinearMap& precond,
                             const LobpcgOptions& options, const CMatrix* initial) {
  const Eigen::Index m = std::min<Eigen::Index>(std::max(options.block, 1), dim);
  CMatrix x(dim, m);
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss;
  for (Eigen::Index k = 0; k < m; ++k) {
    for (Eigen::Index i = 0; i < dim; ++i) x(i, k) = Complex(gauss(rng), gauss(rng));
  }
  if (initial != nullptr && initial->rows() == dim) {
    const Eigen::Index c = std::min(m, initial->cols());
    x.leftCols(c) = initial->leftCols(c);
  }
  x = orthonormal(x);
  CMatrix ax;
  op(x, ax);
  Eigen::VectorXd theta = rayleigh_ritz(x, ax);

  CMatrix p, ap, w, aw;
  LobpcgResult out;
  for (int it = 1; it <= options.max_iterations; ++it) {
    const CMatrix r = ax - x * theta.asDiagonal();
    out.iterations = it;
    out.residual = r.col(0).norm();
    out.eigenvalue = theta(0);
    // Ritz values bound eigenvalues to |r| and, across a gap, to |r|^2 / gap; the
    // gap to the next eigenvalue is estimated as half the Ritz gap.
    double bound = out.residual;
    if (m > 1 && theta(1) > theta(0)) bound = std::min(bound, out.residual * out.residual / (0.5 * (theta(1) - theta(0))));
    if (bound <= options.tol * std::max(theta(0), options.abs_floor)) {
      out.converged = true;
      break;
    }

    if (precond) {
      precond(r, w);
    } else {
      w = r;
    }
    for (int pass = 0; pass < 2; ++pass) w -= x * (x.adjoint() * w);
    op(w, aw);
    normalize_columns(w, aw);
    if (p.cols() > 0) normalize_columns(p, ap);

    const Eigen::Index k = m + w.cols() + p.cols();
    CMatrix s(dim, k), as(dim, k);
    s << x, w, p;
    as << ax, aw, ap;
    Eigen::SelfAdjointEigenSolver<CMatrix> gram(hermitian_part(s.adjoint() * s));
    const Eigen::VectorXd& d = gram.eigenvalues();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (d(j) > 1e-12 * d(k - 1)) keep.push_back(j);
    }
    CMatrix z(k, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) {
      z.col(static_cast<Eigen::Index>(j)) = gram.eigenvectors().col(keep[j]) / std::sqrt(d(keep[j]));
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> ritz(hermitian_part(z.adjoint() * (s.adjoint() * as) * z));
    const CMatrix c = z * ritz.eigenvectors().leftCols(m);
    theta = ritz.eigenvalues().head(m);

    CMatrix cwp = c;
    cwp.topRows(m).setZero();
    p = s * cwp;
    ap = as * cwp;
    x = s * c;
    ax = as * c;

    if (it % options.refresh == 0) {
      x = orthonormal(x);
      op(x, ax);
      theta = rayleigh_ritz(x, ax);
    }
  }

  // Final Rayleigh quotient of the lowest vector.
  const CVector v = x.col(0) / x.col(0).norm();
  CMatrix av;
  op(CMatrix(v), av);
  out.eigenvalue = std::max(0.0, v.dot(av.col(0)).real());
  out.residual = (av.col(0) - out.eigenvalue * v).norm();
  out.vector = v;
  out.block = x;
  return out;
}

}  // namespace ckfz
