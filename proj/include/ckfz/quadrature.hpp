#ifndef CKFZ_QUADRATURE_HPP_
#define CKFZ_QUADRATURE_HPP_

#include <vector>

namespace ckfz {

struct Rule1d {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [-1, 1] (Golub-Welsch, then one Newton polish per node).
Rule1d gauss_legendre(int n);

// Composite rule on [a, b]: `panels` equal panels, each with an `order`-point Gauss-Legendre rule.
Rule1d composite_gauss_legendre(double a, double b, int panels, int order);

}  // namespace ckfz

#endif  // CKFZ_QUADRATURE_HPP_
