#pragma once
#include <functional>
#include <span>
#include <vector>

namespace jmis {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  double integrate(const std::function<double(double)> &f) const;
};

//! n-point Gauss-Legendre rule mapped onto [a, b].
QuadratureRule gauss_legendre(int n, double a, double b);

//! Gauss-Legendre panels between consecutive breakpoints, n nodes each.
QuadratureRule composite_gauss_legendre(std::span<const double> breakpoints,
                                        int nodes_per_panel);

} // namespace jmis
