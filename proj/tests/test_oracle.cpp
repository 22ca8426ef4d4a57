#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <jmis/errors.hpp>
#include <jmis/jmatrix.hpp>
#include <jmis/nnfit.hpp>
#include <jmis/oracle.hpp>

#include "support/reference.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace jmis;

namespace {

const OscillatorBasis kBasis(500.0, 0);

SeparablePotential nn_potential(Channel channel) {
  NNPotentialConfig c;
  c.channel = channel;
  c.v11_hw = channel == Channel::triplet ? -0.81512 : -0.7315;
  c.e_i_mev = 189.525;
  return c.potential();
}

double phase_distance(double a, double b) { return std::abs(std::sin(a - b)); }

std::vector<double> lab_energies() {
  std::vector<double> e;
  for (int i = 0; i < 20; ++i)
    e.push_back(1.0 + 299.0 * i / 19.0);
  return e;
}

} // namespace

TEST_CASE("momentum grid") {
  const auto g = make_momentum_grid(1.3, 40.0, 32);
  // Panels split at 0, k0, 2 k0, k_max/8, k_max/4, k_max/2, k_max.
  CHECK(g.nodes.size() == 6 * 32);
  double sum = 0.0;
  for (double w : g.weights)
    sum += w;
  CHECK(sum == doctest::Approx(40.0).epsilon(1e-13));
  for (double k : g.nodes)
    CHECK(std::abs(k - 1.3) > 1e-6);
  CHECK(g.scheme == "pole-subtraction");
  CHECK_THROWS_AS(make_momentum_grid(0.0, 40.0, 32), std::invalid_argument);
  CHECK_THROWS_AS(make_momentum_grid(50.0, 40.0, 32), std::invalid_argument);
  CHECK_THROWS_AS(make_momentum_grid(1.0, 40.0, 8), std::invalid_argument);
}

TEST_CASE("momentum form factors are normalized and orthogonal") {
  for (int l : {0, 1}) {
    const OscillatorBasis b(500.0, l);
    const auto rule = jmis::testing::radial_rule(12.0 / b.r0());
    for (int n = 0; n <= 6; ++n)
      for (int m = n; m <= 6; ++m) {
        const double s = rule.integrate([&](double k) {
          return momentum_form_factor(b, n, k) * momentum_form_factor(b, m, k);
        });
        CHECK(std::abs(s - (n == m ? 1.0 : 0.0)) < 1e-10);
      }
    CHECK(momentum_form_factor(b, 3, 0.0) == 0.0);
  }
}

TEST_CASE("momentum form factor is the Fourier-Bessel transform") {
  const auto rule = jmis::testing::radial_rule(15.0 * kBasis.r0(), 120, 24);
  for (int n : {0, 2, 5})
    for (double k : {0.3, 1.0, 2.5}) {
      // l = 0: k r j_0(kr) = sin(kr).
      const double ft = std::sqrt(2.0 / std::numbers::pi) *
                        rule.integrate([&](double r) { return form_factor(kBasis, n, r) * std::sin(k * r); });
      CAPTURE(n);
      CAPTURE(k);
      CHECK(std::abs(ft - momentum_form_factor(kBasis, n, k)) < 1e-10);
    }
  const OscillatorBasis b1(500.0, 1);
  for (int n : {0, 3}) {
    const double k = 1.1;
    // l = 1: k r j_1(kr) = sin(kr)/(kr) - cos(kr); equal up to i^l.
    const double ft = std::sqrt(2.0 / std::numbers::pi) * rule.integrate([&](double r) {
      const double x = k * r;
      return form_factor(b1, n, r) * (std::sin(x) / x - std::cos(x));
    });
    CHECK(std::abs(std::abs(ft) - std::abs(momentum_form_factor(b1, n, k))) < 1e-10);
  }
}

TEST_CASE("free motion gives zero phase shift") {
  for (double e : {0.5, 20.0, 150.0})
    CHECK(std::abs(solve_tmatrix(SeparablePotential::zero(kBasis, 2), e)) < 1e-14);
  CHECK_THROWS_AS(solve_tmatrix(SeparablePotential::zero(kBasis, 1), 0.0), std::invalid_argument);
}

TEST_CASE("rank-1 potential against the J-matrix") {
  for (double v00 : {-400.0, -100.0, 250.0}) {
    Eigen::MatrixXd v(1, 1);
    v << v00;
    const SeparablePotential pot(kBasis, v);
    const TruncatedHamiltonian h(pot);
    for (double e_lab : lab_energies()) {
      const double e = 0.5 * e_lab;
      CHECK(phase_distance(solve_tmatrix(pot, e), phase_shift(h, e)) < 1e-9);
    }
  }
}

TEST_CASE("NN potentials against the J-matrix") {
  for (auto ch : {Channel::singlet, Channel::triplet}) {
    const auto pot = nn_potential(ch);
    const TruncatedHamiltonian h(pot);
    for (double e_lab : lab_energies()) {
      const double e = 0.5 * e_lab;
      CHECK(phase_distance(solve_tmatrix(pot, e), phase_shift(h, e)) < 1e-6);
    }
  }
}

TEST_CASE("random potentials and partial waves against the J-matrix") {
  std::mt19937 rng(41);
  for (int trial = 0; trial < 6; ++trial) {
    const OscillatorBasis b(300.0 + 100.0 * trial, trial % 3);
    const auto pot = jmis::testing::random_potential(rng, b, trial % 3);
    const TruncatedHamiltonian h(pot);
    for (double e : {0.7, 13.0, 77.0, 149.0})
      CHECK(phase_distance(solve_tmatrix(pot, e), phase_shift(h, e)) < 1e-6);
  }
}

TEST_CASE("triplet value at E_lab = 10 MeV") {
  const double d = solve_tmatrix(nn_potential(Channel::triplet), 5.0);
  // Principal branch of the recorded value; the unwrapped curve adds pi.
  CHECK(d == doctest::Approx(-1.3026975498840561).epsilon(1e-9));
}

TEST_CASE("non-convergence is reported") {
  OracleOptions o;
  o.initial_nodes = 16;
  o.max_nodes = 16;
  CHECK_THROWS_AS(solve_tmatrix(nn_potential(Channel::triplet), 5.0, o), NumericalError);
}
