#pragma once

#include <cstddef>
#include <vector>

namespace vww {

struct GaussRule {
  std::vector<double> nodes;    // on [-1,1]
  std::vector<double> weights;
};

/// Gauss-Legendre rule with n points, cached per n.
const GaussRule& gauss_legendre(std::size_t n);

/// Composite Gauss-Legendre on [a,b] with `panels` equal panels.
template <class F>
double composite_gauss(F&& f, double a, double b, std::size_t panels, std::size_t points) {
  const GaussRule& rule = gauss_legendre(points);
  const double width = (b - a) / static_cast<double>(panels);
  double total = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + width * static_cast<double>(p);
    const double mid = lo + 0.5 * width;
    double s = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      s += rule.weights[k] * f(mid + 0.5 * width * rule.nodes[k]);
    }
    total += 0.5 * width * s;
  }
  return total;
}

}  // namespace vww
