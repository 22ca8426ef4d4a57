#include <jmis/quadrature.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace jmis {

double QuadratureRule::integrate(const std::function<double(double)> &f) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    sum += weights[i] * f(nodes[i]);
  return sum;
}

QuadratureRule gauss_legendre(int n, double a, double b) {
  if (n < 1)
    throw std::invalid_argument("gauss_legendre: n must be positive");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Tricomi's initial guess, then Newton on P_n.
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16)
        break;
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = mid - half * z;
    rule.nodes[n - 1 - i] = mid + half * z;
    rule.weights[i] = rule.weights[n - 1 - i] = half * w;
  }
  return rule;
}

QuadratureRule composite_gauss_legendre(std::span<const double> breakpoints,
                                        int nodes_per_panel) {
  QuadratureRule rule;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const auto panel =
        gauss_legendre(nodes_per_panel, breakpoints[i], breakpoints[i + 1]);
    rule.nodes.insert(rule.nodes.end(), panel.nodes.begin(), panel.nodes.end());
    rule.weights.insert(rule.weights.end(), panel.weights.begin(),
                        panel.weights.end());
  }
  return rule;
}

} // namespace jmis
