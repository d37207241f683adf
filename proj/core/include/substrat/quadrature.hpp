#pragma once

#include <vector>

namespace substrat {

/// Nodes and weights of a one-dimensional quadrature rule.
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss–Legendre rule on [a, b]. Reference rules on [-1, 1] are
/// cached; the cache is guarded and safe to use from several threads.
Rule gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// `panels` equal panels on [a, b], each carrying an `order`-point
/// Gauss–Legendre rule.
Rule composite_gauss_legendre(double a, double b, int panels, int order);

}  // namespace substrat
