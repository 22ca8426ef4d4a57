#include <jmis/oscillator_basis.hpp>

#include <jmis/errors.hpp>

#include "special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace jmis {

namespace {

using cplx = std::complex<double>;

void require_index(int n, const char *what) {
  if (n < 0)
    throw std::invalid_argument(std::string(what) + ": negative basis index");
}

// Coefficients of the kinetic recurrence written as
//   lower(n) f_{n-1} - (diag(n) - x) f_n + upper(n) f_{n+1} = 0,   n >= 1,
// which is -2/hbar*omega times row n of (T - E) f = 0.
struct Recurrence {
  double alpha; // l + 1/2
  double lower(int n) const { return std::sqrt(n * (n + alpha)); }
  double diag(int n) const { return 2.0 * n + alpha + 1.0; }
  double upper(int n) const { return std::sqrt((n + 1.0) * (n + alpha + 1.0)); }
};

// Largest n for which C_n is taken from its closed form rather than from the
// forward recurrence. Below ~x/5 the series suffers little cancellation and
// the recurrence would be running against the decaying solution; above it the
// forward recurrence is stable.
int direct_c_limit(double x) {
  if (x <= 0.0)
    return 1;
  return std::max(1, static_cast<int>(x / 5.0));
}

cplx c_closed_form_scaled(int n, int l, cplx p, double x) {
  // C_n exp(-x/2) = sqrt(2 n!/Gamma(n+l+3/2)) p^-l / |Gamma(1/2-l)|
  //                 * exp(-x) M(-n-l-1/2, 1/2-l, x)
  // using (-1)^l / Gamma(1/2-l) = 1/|Gamma(1/2-l)|.
  const double log_pref = 0.5 * (std::log(2.0) + std::lgamma(n + 1.0) -
                                 std::lgamma(n + l + 1.5)) -
                          detail::log_abs_gamma(0.5 - l);
  const auto m = detail::kummer_m(-n - l - 0.5, 0.5 - l, x);
  const double mag = m.mantissa * std::exp(m.log_scale - x + log_pref);
  if (l == 0)
    return {mag, 0.0};
  if (p == cplx(0.0))
    throw std::domain_error("c_solution: irregular solution diverges at p = 0 "
                            "for l > 0");
  return mag * std::pow(p, -l);
}

} // namespace

OscillatorBasis::OscillatorBasis(double hbar_omega_mev, int l,
                                 double mass_constant)
    : hbar_omega_(hbar_omega_mev), l_(l), mass_constant_(mass_constant) {
  if (!(hbar_omega_mev > 0.0))
    throw std::invalid_argument("OscillatorBasis: hbar_omega must be positive");
  if (!(mass_constant > 0.0))
    throw std::invalid_argument(
        "OscillatorBasis: mass constant must be positive");
  if (l < 0)
    throw std::invalid_argument("OscillatorBasis: l must be non-negative");
  r0_ = std::sqrt(mass_constant_ / hbar_omega_);
}

double OscillatorBasis::kinetic_hw(int n, int np) const {
  require_index(n, "kinetic_hw");
  require_index(np, "kinetic_hw");
  if (n == np)
    return 0.5 * (2.0 * n + l_ + 1.5);
  if (std::abs(n - np) == 1) {
    const int k = std::min(n, np);
    // Negative with the (-1)^n phase convention of the basis functions.
    return -0.5 * std::sqrt((k + 1.0) * (k + l_ + 1.5));
  }
  return 0.0;
}

Momentum Momentum::real(double p) {
  if (!(p >= 0.0))
    throw std::invalid_argument("Momentum::real: p must be non-negative");
  return Momentum({p, 0.0});
}

Momentum Momentum::imaginary(double kappa) {
  if (!(kappa > 0.0))
    throw std::invalid_argument("Momentum::imaginary: kappa must be positive");
  return Momentum({0.0, kappa});
}

Momentum Momentum::from_energy_hw(double energy_hw) {
  if (energy_hw >= 0.0)
    return real(std::sqrt(2.0 * energy_hw));
  return imaginary(std::sqrt(-2.0 * energy_hw));
}

double Momentum::squared() const {
  return is_real() ? value_.real() * value_.real()
                   : -value_.imag() * value_.imag();
}

double form_factor(const OscillatorBasis &basis, int n, double r_fm) {
  require_index(n, "form_factor");
  return form_factor_table(basis, n, r_fm).back();
}

std::vector<double> form_factor_table(const OscillatorBasis &basis, int n_max,
                                      double r_fm) {
  require_index(n_max, "form_factor_table");
  if (r_fm < 0.0)
    throw std::invalid_argument("form_factor_table: negative radius");
  std::vector<double> out(n_max + 1, 0.0);
  if (r_fm == 0.0)
    return out;

  const int l = basis.l();
  const double r0 = basis.r0();
  const double y = (r_fm / r0) * (r_fm / r0);
  const Recurrence rec{l + 0.5};

  // phi_n = mant_n * exp(log_scale); rescaled whenever the mantissa grows.
  double log_scale = 0.5 * (std::log(2.0 / r0) - std::lgamma(l + 1.5)) +
                     0.5 * (l + 1) * std::log(y) - 0.5 * y;
  std::vector<double> mant(n_max + 1);
  mant[0] = 1.0;
  std::vector<double> scale_at(n_max + 1, log_scale);
  if (n_max >= 1)
    mant[1] = (y - rec.diag(0)) / rec.upper(0);
  scale_at[std::min(1, n_max)] = log_scale;
  for (int n = 1; n < n_max; ++n) {
    mant[n + 1] =
        ((y - rec.diag(n)) * mant[n] - rec.lower(n) * mant[n - 1]) /
        rec.upper(n);
    scale_at[n + 1] = log_scale;
    const double big = std::max(std::abs(mant[n + 1]), std::abs(mant[n]));
    if (big > 1e100) {
      mant[n] /= big;
      mant[n + 1] /= big;
      log_scale += std::log(big);
      scale_at[n] = scale_at[n + 1] = log_scale;
    }
  }
  for (int n = 0; n <= n_max; ++n)
    out[n] = mant[n] * std::exp(scale_at[n]);
  return out;
}

double kinetic_matrix_element(const OscillatorBasis &basis, int n, int np) {
  return basis.hbar_omega() * basis.kinetic_hw(n, np);
}

double r2_matrix_element(const OscillatorBasis &basis, int n, int np) {
  require_index(n, "r2_matrix_element");
  require_index(np, "r2_matrix_element");
  const double r02 = basis.r0() * basis.r0();
  const int l = basis.l();
  if (n == np)
    return r02 * (2.0 * n + l + 1.5);
  if (std::abs(n - np) == 1) {
    const int k = std::min(n, np);
    return r02 * std::sqrt((k + 1.0) * (k + l + 1.5));
  }
  return 0.0;
}

JSolutionTable::JSolutionTable(const OscillatorBasis &basis, Momentum p,
                               int n_max)
    : p_(p) {
  require_index(n_max, "JSolutionTable");
  const int l = basis.l();
  const double x = p.squared();
  const cplx pv = p.value();
  const Recurrence rec{l + 0.5};

  s_.resize(n_max + 1);
  c_.resize(n_max + 1);

  // Regular solution: normalized Laguerre polynomials
  // sqrt(n!/Gamma(n+l+3/2)) L_n^{l+1/2}(x), forward recurrence.
  std::vector<double> lag(n_max + 1);
  lag[0] = std::exp(-0.5 * std::lgamma(l + 1.5));
  if (n_max >= 1)
    lag[1] = (rec.diag(0) - x) * lag[0] / rec.upper(0);
  for (int n = 1; n < n_max; ++n)
    lag[n + 1] = ((rec.diag(n) - x) * lag[n] - rec.lower(n) * lag[n - 1]) /
                 rec.upper(n);
  const cplx s_pref = std::sqrt(2.0) * std::pow(pv, l + 1);
  for (int n = 0; n <= n_max; ++n)
    s_[n] = s_pref * lag[n];

  // Irregular solution: closed form up to direct_c_limit, then forward.
  const int n_direct = std::min(n_max, direct_c_limit(x));
  for (int n = 0; n <= n_direct; ++n)
    c_[n] = c_closed_form_scaled(n, l, pv, x);
  for (int n = std::max(1, n_direct); n < n_max; ++n)
    c_[n + 1] =
        ((rec.diag(n) - x) * c_[n] - rec.lower(n) * c_[n - 1]) / rec.upper(n);
}

std::complex<double> JSolutionTable::s(int n) const {
  return std::exp(-half_x()) * s_.at(n);
}

std::complex<double> JSolutionTable::c(int n) const {
  return std::exp(half_x()) * c_.at(n);
}

std::complex<double> JSolutionTable::c_pm(int n, int sign) const {
  if (sign != 1 && sign != -1)
    throw std::invalid_argument("c_pm: sign must be +1 or -1");
  return c(n) + static_cast<double>(sign) * cplx(0.0, 1.0) * s(n);
}

std::complex<double> s_solution(const OscillatorBasis &basis, int n,
                                Momentum p) {
  require_index(n, "s_solution");
  return JSolutionTable(basis, p, n).s(n);
}

std::complex<double> c_solution(const OscillatorBasis &basis, int n,
                                Momentum p) {
  require_index(n, "c_solution");
  return JSolutionTable(basis, p, n).c(n);
}

std::complex<double> c_plus_minus(const OscillatorBasis &basis, int n,
                                  Momentum p, int sign) {
  require_index(n, "c_plus_minus");
  return JSolutionTable(basis, p, n).c_pm(n, sign);
}

std::vector<std::complex<double>>
outgoing_solution_table(const OscillatorBasis &basis, Momentum p, int n_max) {
  require_index(n_max, "outgoing_solution_table");
  if (p.is_real())
    throw std::invalid_argument(
        "outgoing_solution_table: requires imaginary momentum");
  const double kappa = p.value().imag();
  const double x = p.squared();
  const Recurrence rec{basis.l() + 0.5};

  // ratio[n] = f_n / f_{n-1} for the minimal solution, by backward recursion
  // from a start index far enough beyond n_max that the dominant solution
  // has died out.
  auto ratios_from = [&](long start) {
    std::vector<double> ratio(n_max + 1, 0.0);
    double r = 0.0;
    for (long n = start; n >= 1; --n) {
      r = rec.lower(static_cast<int>(n)) /
          (rec.diag(static_cast<int>(n)) - x - rec.upper(static_cast<int>(n)) * r);
      if (n <= n_max)
        ratio[n] = r;
    }
    return ratio;
  };

  const double gap = 10.0 / kappa;
  long start = static_cast<long>(std::pow(std::sqrt(n_max + 1.0) + gap, 2)) + 16;
  constexpr long kMaxStart = 50'000'000;
  std::vector<double> ratio = ratios_from(std::min(start, kMaxStart));
  for (;;) {
    if (start > kMaxStart)
      throw NumericalError("outgoing_solution_table: backward recursion start "
                           "exceeds limit; binding too shallow for n_max=" +
                           std::to_string(n_max));
    const long next = start + start / 2;
    auto refined = ratios_from(std::min(next, kMaxStart));
    double diff = 0.0;
    for (int n = 1; n <= n_max; ++n)
      diff = std::max(diff, std::abs(refined[n] - ratio[n]) /
                                std::max(std::abs(refined[n]), 1e-300));
    ratio = std::move(refined);
    start = next;
    if (diff < 1e-13)
      break;
  }

  std::vector<cplx> out(n_max + 1);
  out[0] = JSolutionTable(basis, p, 1).c_pm(0, +1);
  for (int n = 1; n <= n_max; ++n)
    out[n] = out[n - 1] * ratio[n];
  return out;
}

} // namespace jmis
