#pragma once

#include <vector>

namespace polyheat {

struct GaussRule {
  std::vector<double> nodes;   // on [-1, 1]
  std::vector<double> weights;
};

/// n-point Gauss–Legendre rule, computed once and cached.
const GaussRule& gauss_legendre(int n);

/// Composite Gauss–Legendre over [a, b] with `panels` equal panels of `order` nodes.
template <class Fn>
double composite_gauss(Fn&& fn, double a, double b, int panels, int order = 16) {
  const GaussRule& rule = gauss_legendre(order);
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    double panel = 0.0;
    for (int i = 0; i < order; ++i) panel += rule.weights[i] * fn(mid + 0.5 * h * rule.nodes[i]);
    total += 0.5 * h * panel;
  }
  return total;
}

} // namespace polyheat
