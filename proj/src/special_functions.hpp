#pragma once
#include <cmath>

namespace jmis::detail {

//! A real number stored as mantissa * exp(log_scale), to carry values whose
//! magnitude would overflow or underflow a plain double.
struct Scaled {
  double mantissa = 0.0;
  double log_scale = 0.0;

  double value() const { return mantissa * std::exp(log_scale); }
  //! mantissa * exp(log_scale + shift), evaluated without intermediate overflow
  double value_shifted(double shift) const {
    return mantissa * std::exp(log_scale + shift);
  }
};

//! Kummer's confluent hypergeometric function M(a, b, x) = 1F1(a; b; x) for
//! real arguments. b must not be a non-positive integer. Negative x is mapped
//! through Kummer's transformation M(a,b,x) = e^x M(b-a,b,-x) so the summed
//! series always has a non-negative argument. The series is accumulated in the
//! log domain, so the result is valid for |x| in the thousands.
Scaled kummer_m(double a, double b, double x);

//! log|Gamma(x)| and the sign of Gamma(x) for real non-pole x.
double log_abs_gamma(double x, int *sign = nullptr);

} // namespace jmis::detail
