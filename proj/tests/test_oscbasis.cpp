#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <jmis/oscillator_basis.hpp>

#include "support/reference.hpp"

#include <cmath>
#include <complex>
#include <numbers>

using namespace jmis;
using jmis::testing::oscillator_function;
using jmis::testing::radial_rule;

namespace {

const OscillatorBasis kBasis(500.0, 0);

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Recursion residual T_{n,n-1} f_{n-1} + (T_nn - E) f_n + T_{n,n+1} f_{n+1},
// relative to the largest term.
template <class Fn>
double recursion_residual(const OscillatorBasis &b, Fn f, int n, double e_hw) {
  const auto t0 = b.kinetic_hw(n, n - 1) * f(n - 1);
  const auto t1 = (b.kinetic_hw(n, n) - e_hw) * f(n);
  const auto t2 = b.kinetic_hw(n, n + 1) * f(n + 1);
  const double scale = std::max({std::abs(t0), std::abs(t1), std::abs(t2)});
  return std::abs(t0 + t1 + t2) / scale;
}

} // namespace

TEST_CASE("basis invariants and validation") {
  CHECK(kBasis.r0() == std::sqrt(kNucleonMassConstant / 500.0));
  CHECK_THROWS_AS(OscillatorBasis(0.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(OscillatorBasis(500.0, -1), std::invalid_argument);
  CHECK_THROWS_AS(OscillatorBasis(500.0, 0, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(form_factor(kBasis, -1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(form_factor(kBasis, 0, -1.0), std::invalid_argument);
}

TEST_CASE("form factor matches the closed form and vanishes at the origin") {
  for (int l : {0, 1, 3})
    for (int n : {0, 1, 4, 9}) {
      const OscillatorBasis b(300.0, l);
      CHECK(form_factor(b, n, 0.0) == 0.0);
      for (double r : {0.05, 0.3, 0.9, 2.0})
        CHECK(rel(form_factor(b, n, r), oscillator_function(n, l, b.r0(), r).value) <
              1e-12);
    }
}

TEST_CASE("form factor table stays finite for large n") {
  const auto t = form_factor_table(kBasis, 5000, 30.0);
  for (double v : t)
    CHECK(std::isfinite(v));
}

TEST_CASE("orthonormality by quadrature") {
  for (int l : {0, 2}) {
    const OscillatorBasis b(500.0, l);
    const auto rule = radial_rule(12.0 * b.r0());
    for (int n = 0; n <= 10; ++n)
      for (int m = n; m <= 10; ++m) {
        const double g = rule.integrate(
            [&](double r) { return form_factor(b, n, r) * form_factor(b, m, r); });
        CHECK(std::abs(g - (n == m ? 1.0 : 0.0)) < 1e-8);
      }
  }
}

TEST_CASE("kinetic matrix elements against quadrature") {
  CHECK(kinetic_matrix_element(kBasis, 0, 2) == 0.0);
  CHECK(kinetic_matrix_element(kBasis, 0, 0) == doctest::Approx(0.75 * 500.0).epsilon(1e-15));
  for (int l : {0, 1, 2}) {
    const OscillatorBasis b(500.0, l);
    const auto rule = radial_rule(12.0 * b.r0());
    for (int n = 0; n <= 5; ++n)
      for (int m = n; m <= n + 2; ++m) {
        // <n|T|m> = (hbar^2/2mu) int [phi_n' phi_m' + l(l+1)/r^2 phi_n phi_m] dr
        const double q = 0.5 * b.mass_constant() * rule.integrate([&](double r) {
          const auto a = oscillator_function(n, l, b.r0(), r);
          const auto c = oscillator_function(m, l, b.r0(), r);
          return a.derivative * c.derivative + l * (l + 1) / (r * r) * a.value * c.value;
        });
        const double t = kinetic_matrix_element(b, n, m);
        if (m - n > 1)
          CHECK(std::abs(q) < 1e-8 * b.hbar_omega());
        else
          CHECK(rel(t, q) < 1e-10);
        CHECK(kinetic_matrix_element(b, m, n) == t);
      }
  }
}

TEST_CASE("r^2 matrix elements against quadrature") {
  CHECK(r2_matrix_element(kBasis, 0, 2) == 0.0);
  CHECK(r2_matrix_element(kBasis, 0, 0) == doctest::Approx(1.5 * kBasis.r0() * kBasis.r0()));
  for (int l : {0, 1}) {
    const OscillatorBasis b(500.0, l);
    const auto rule = radial_rule(14.0 * b.r0());
    for (int n = 0; n <= 5; ++n)
      for (int m = n; m <= n + 1; ++m) {
        const double q = rule.integrate([&](double r) {
          return r * r * form_factor(b, n, r) * form_factor(b, m, r);
        });
        CHECK(rel(r2_matrix_element(b, n, m), q) < 1e-10);
        CHECK(r2_matrix_element(b, m, n) == r2_matrix_element(b, n, m));
      }
  }
}

TEST_CASE("S and C against high-precision reference values") {
  struct Case {
    int n, l;
    double p, s, c;
  };
  // 40-digit evaluations of the Laguerre and Kummer closed forms.
  const Case cases[] = {
      {0, 0, 1.3, 0.83889391186890581267, -0.50675515461297876636},
      {1, 0, 1.3, -0.13014126205238887777, -0.72689462128109683363},
      {5, 0, 1.3, -0.064192256564878440019, 0.52107043516596710395},
      {20, 0, 1.3, -0.2595983412173871224, 0.27166929513725634218},
      {0, 1, 0.7, 0.47042547264445663186, 0.80810236835996205634},
      {3, 1, 0.7, 0.59210757470947871315, -0.036772322342051930475},
      {2, 2, 2.5, -0.13640467028981695906, 0.65796988946812821218},
      {10, 0, 4.0, -0.29096925593663383124, 0.40020866146638731987},
      {8, 0, 0.05, 0.13524910504992196747, 0.44372095527471926068},
  };
  for (const auto &c : cases) {
    const OscillatorBasis b(500.0, c.l);
    const auto p = Momentum::real(c.p);
    CAPTURE(c.n);
    CAPTURE(c.l);
    CHECK(rel(s_solution(b, c.n, p).real(), c.s) < 1e-12);
    CHECK(rel(c_solution(b, c.n, p).real(), c.c) < 1e-11);
    CHECK(s_solution(b, c.n, p).imag() == 0.0);
    CHECK(c_solution(b, c.n, p).imag() == 0.0);
  }
}

TEST_CASE("S_0 closed form at p = 1") {
  const double expected = std::sqrt(2.0 / std::tgamma(1.5)) * std::exp(-0.5);
  CHECK(rel(s_solution(kBasis, 0, Momentum::real(1.0)).real(), expected) < 1e-14);
  CHECK(expected == doctest::Approx(0.9112).epsilon(1e-4));
  CHECK(s_solution(kBasis, 7, Momentum::real(0.0)) == std::complex<double>(0.0));
}

TEST_CASE("C_0 against independent series summation") {
  for (double p : {0.5, 1.0, 2.0}) {
    const long double x = static_cast<long double>(p) * p;
    const long double m = jmis::testing::hyp1f1_series(-0.5L, 0.5L, x);
    const double pref = std::sqrt(2.0 / std::tgamma(1.5)) / std::sqrt(std::numbers::pi);
    const double expected = static_cast<double>(pref * std::exp(-x / 2) * m);
    CHECK(rel(c_solution(kBasis, 0, Momentum::real(p)).real(), expected) < 1e-10);
  }
}

TEST_CASE("three-term recursion residuals") {
  for (int l : {0, 1, 2}) {
    const OscillatorBasis b(500.0, l);
    for (double p : {0.4, 1.3, 3.0}) {
      const auto mom = Momentum::real(p);
      const JSolutionTable t(b, mom, 60);
      const double e = mom.energy_hw();
      for (int n = 1; n <= 50; ++n) {
        CAPTURE(n);
        CHECK(recursion_residual(b, [&](int k) { return t.s(k).real(); }, n, e) < 1e-9);
        CHECK(recursion_residual(b, [&](int k) { return t.c(k).real(); }, n, e) < 1e-9);
      }
    }
  }
}

TEST_CASE("C carries a source term in row 0") {
  // T00 C0 - E C0 + T01 C1 equals -(hbar*omega) p / (pi S0) in hbar*omega units.
  const auto mom = Momentum::real(0.9);
  const JSolutionTable t(kBasis, mom, 2);
  const double row0 = (kBasis.kinetic_hw(0, 0) - mom.energy_hw()) * t.c(0).real() +
                      kBasis.kinetic_hw(0, 1) * t.c(1).real();
  CHECK(std::abs(row0) > 1e-3);
  const double s_row0 = (kBasis.kinetic_hw(0, 0) - mom.energy_hw()) * t.s(0).real() +
                        kBasis.kinetic_hw(0, 1) * t.s(1).real();
  CHECK(std::abs(s_row0) < 1e-14);
}

TEST_CASE("Casorati combination is n-independent") {
  for (int l : {0, 1, 2})
    for (double p : {0.3, 1.0, 2.2}) {
      const OscillatorBasis b(500.0, l);
      const JSolutionTable t(b, Momentum::real(p), 51);
      double lo = HUGE_VAL, hi = -HUGE_VAL;
      for (int n = 0; n <= 50; ++n) {
        const double w = b.kinetic_hw(n, n + 1) *
                         (t.s(n).real() * t.c(n + 1).real() - t.s(n + 1).real() * t.c(n).real());
        lo = std::min(lo, w);
        hi = std::max(hi, w);
      }
      CHECK((hi - lo) / std::abs(hi) < 1e-9);
      // Recorded value: p / pi in hbar*omega units.
      CHECK(rel(hi, p / std::numbers::pi) < 1e-9);
    }
}

TEST_CASE("C plus/minus combinations") {
  const auto p = Momentum::real(1.0);
  const auto cp = c_plus_minus(kBasis, 0, p, +1), cm = c_plus_minus(kBasis, 0, p, -1);
  const auto c = c_solution(kBasis, 0, p), s = s_solution(kBasis, 0, p);
  CHECK(std::abs(cp + cm - 2.0 * c) < 1e-15);
  CHECK(std::abs(cp - cm - 2.0 * std::complex<double>(0, 1) * s) < 1e-15);
  const auto p7 = Momentum::real(0.7);
  CHECK(std::abs(c_plus_minus(kBasis, 3, p7, +1)) ==
        doctest::Approx(std::abs(c_plus_minus(kBasis, 3, p7, -1))));
  CHECK(c_plus_minus(kBasis, 3, p7, +1) == std::conj(c_plus_minus(kBasis, 3, p7, -1)));
  CHECK_THROWS_AS(c_plus_minus(kBasis, 0, p, 0), std::invalid_argument);
}

TEST_CASE("continuation to imaginary momentum") {
  struct Case {
    int n, l;
    double kappa, s_re, s_im, cp_re, cp_im;
  };
  const Case cases[] = {
      {0, 0, 0.3, 0.0, 0.47141894747966015656, 0.49376182122736065075, 0.0},
      {1, 0, 0.3, 0.0, 0.61201001449468672999, 0.3102289797672052566, 0.0},
      {4, 0, 0.3, 0.0, 0.92676989675938130436, 0.14566566799747026805, 0.0},
      {0, 1, 0.5, -0.34747512263608913496, 0.0, 0.0, -0.47196944814698373947},
      {2, 1, 0.5, -0.87734703856900735594, 0.0, 0.0, -0.15152327670705406144},
  };
  for (const auto &c : cases) {
    const OscillatorBasis b(500.0, c.l);
    const auto p = Momentum::imaginary(c.kappa);
    const auto s = s_solution(b, c.n, p);
    const auto cp = c_plus_minus(b, c.n, p, +1);
    const std::complex<double> s_ref(c.s_re, c.s_im), cp_ref(c.cp_re, c.cp_im);
    CAPTURE(c.n);
    CHECK(std::abs(s - s_ref) / std::abs(s_ref) < 1e-10);
    CHECK(std::abs(cp - cp_ref) / std::abs(cp_ref) < 1e-9);
  }
}

TEST_CASE("outgoing solution table is the decaying solution") {
  const auto p = Momentum::imaginary(0.3);
  const auto t = outgoing_solution_table(kBasis, p, 200);
  const JSolutionTable direct(kBasis, p, 4);
  for (int n = 0; n <= 4; ++n)
    CHECK(std::abs(t[n] - direct.c_pm(n, +1)) / std::abs(t[n]) < 1e-9);
  CHECK(std::abs(t[200]) < 1e-3 * std::abs(t[0]));
  CHECK_THROWS_AS(outgoing_solution_table(kBasis, Momentum::real(0.3), 10),
                  std::invalid_argument);
}

TEST_CASE("large arguments stay finite") {
  const JSolutionTable t(kBasis, Momentum::real(40.0), 10);
  for (int n = 0; n <= 10; ++n) {
    CHECK(std::isfinite(t.s_scaled(n).real()));
    CHECK(std::isfinite(t.c_scaled(n).real()));
  }
}
