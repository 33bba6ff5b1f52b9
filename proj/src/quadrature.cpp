#include "ckfz/quadrature.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "ckfz/error.hpp"

namespace ckfz {

Rule1d gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "Gauss-Legendre rule needs n >= 1");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double beta = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = jacobi(k - 1, k) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  Rule1d rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = eig.eigenvalues()[i];
    // Newton step on P_n; also yields P_n' for the weight formula.
    double p = 1.0, dp = 0.0;
    for (int pass = 0; pass < 2; ++pass) {
      double p0 = 1.0, p1 = x;
      if (n == 1) {
        p = p1;
      } else {
        for (int k = 2; k <= n; ++k) {
          const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = pk;
        }
        p = p1;
      }
      dp = n * (x * p - p0) / (x * x - 1.0);
      if (n == 1) dp = 1.0;
      if (pass == 0) x -= p / dp;
    }
    rule.nodes[static_cast<std::size_t>(i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

Rule1d composite_gauss_legendre(double a, double b, int panels, int order) {
  if (panels < 1 || !(b > a)) throw Error(ErrorKind::InvalidArgument, "composite rule needs panels >= 1 and b > a");
  const Rule1d base = gauss_legendre(order);
  const double h = (b - a) / panels;
  Rule1d rule;
  rule.nodes.reserve(static_cast<std::size_t>(panels * order));
  rule.weights.reserve(static_cast<std::size_t>(panels * order));
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (int i = 0; i < order; ++i) {
      rule.nodes.push_back(mid + 0.5 * h * base.nodes[static_cast<std::size_t>(i)]);
      rule.weights.push_back(0.5 * h * base.weights[static_cast<std::size_t>(i)]);
    }
  }
  return rule;
}

}  // namespace ckfz
