#include "special_functions.hpp"

#include <jmis/errors.hpp>

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

namespace jmis::detail {

namespace {

// Sum of the M(a,b,x) series for x >= 0. Terms are generated as
// (log|t_k|, sign) pairs and summed relative to the largest term.
Scaled kummer_series_nonnegative(double a, double b, double x) {
  if (x == 0.0)
    return {1.0, 0.0};

  // Hard cap grows with x: the terms peak near k ~ x before decaying.
  const int max_terms = 500 + static_cast<int>(3.0 * x);
  std::vector<double> log_t;
  std::vector<int> sgn;
  log_t.reserve(64);
  sgn.reserve(64);

  double lt = 0.0;
  int s = 1;
  double lmax = 0.0;
  const double lx = std::log(x);
  log_t.push_back(lt);
  sgn.push_back(s);

  for (int k = 0;; ++k) {
    const double num = a + k;
    if (num == 0.0)
      break; // terminating polynomial
    const double den = (b + k) * (k + 1);
    lt += std::log(std::abs(num)) - std::log(std::abs(den)) + lx;
    if ((num < 0.0) != (den < 0.0))
      s = -s;
    log_t.push_back(lt);
    sgn.push_back(s);
    lmax = std::max(lmax, lt);
    // Converged once past the peak and the term is negligible against the
    // largest term seen.
    const double ratio = std::abs(num) * x / std::abs(den);
    if (ratio < 1.0 && lt < lmax - 40.0)
      break;
    if (k > max_terms)
      throw NumericalError("kummer_m: series did not converge (a=" +
                           std::to_string(a) + ", b=" + std::to_string(b) +
                           ", x=" + std::to_string(x) + ")");
  }

  // Neumaier summation of the rescaled terms.
  double sum = 0.0, comp = 0.0;
  for (std::size_t k = 0; k < log_t.size(); ++k) {
    const double t = sgn[k] * std::exp(log_t[k] - lmax);
    const double tmp = sum + t;
    if (std::abs(sum) >= std::abs(t))
      comp += (sum - tmp) + t;
    else
      comp += (t - tmp) + sum;
    sum = tmp;
  }
  return {sum + comp, lmax};
}

} // namespace

Scaled kummer_m(double a, double b, double x) {
  if (b <= 0.0 && b == std::floor(b))
    throw std::domain_error("kummer_m: b must not be a non-positive integer");
  if (x >= 0.0)
    return kummer_series_nonnegative(a, b, x);
  Scaled r = kummer_series_nonnegative(b - a, b, -x);
  r.log_scale += x;
  return r;
}

double log_abs_gamma(double x, int *sign) {
  if (sign) {
    if (x > 0.0) {
      *sign = 1;
    } else {
      // Gamma alternates sign between consecutive negative integers.
      const double fl = std::floor(x);
      *sign = (static_cast<long long>(-fl) % 2 == 1) ? -1 : 1;
    }
  }
  return std::lgamma(x);
}

} // namespace jmis::detail
