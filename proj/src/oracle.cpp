#include <jmis/oracle.hpp>

#include <jmis/errors.hpp>
#include <jmis/quadrature.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace jmis {

namespace {

constexpr double kPi = std::numbers::pi;

// Normalized oscillator functions in dimensionless momentum q = k r0,
// sqrt(2 n!/Gamma(n+l+3/2)) q^{l+1} exp(-q^2/2) L_n^{l+1/2}(q^2), n = 0..n_max.
std::vector<double> momentum_functions(int l, int n_max, double q) {
  const double alpha = l + 0.5;
  const double y = q * q;
  std::vector<double> lag(n_max + 1);
  lag[0] = 1.0;
  if (n_max >= 1)
    lag[1] = 1.0 + alpha - y;
  for (int n = 1; n < n_max; ++n)
    lag[n + 1] = ((2.0 * n + 1.0 + alpha - y) * lag[n] - (n + alpha) * lag[n - 1]) /
                 (n + 1.0);
  std::vector<double> out(n_max + 1);
  if (q == 0.0)
    return out;
  const double base = (l + 1) * std::log(q) - 0.5 * y;
  for (int n = 0; n <= n_max; ++n) {
    const double log_norm =
        0.5 * (std::log(2.0) + std::lgamma(n + 1.0) - std::lgamma(n + alpha + 1.0));
    out[n] = std::exp(log_norm + base) * lag[n];
  }
  return out;
}

// Principal-value Green's function matrix in oscillator units,
// G_nn' = P int_0^inf f(q) 2 / (q0^2 - q^2) dq with f = phi_n phi_n'.
Eigen::MatrixXd green_matrix(int l, int dim, double q0, const MomentumGrid &grid) {
  const auto f0 = momentum_functions(l, dim - 1, q0);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
    const double q = grid.nodes[i];
    const auto f = momentum_functions(l, dim - 1, q);
    const double w = 2.0 * grid.weights[i] / (q0 * q0 - q * q);
    for (int n = 0; n < dim; ++n)
      for (int m = n; m < dim; ++m)
        g(n, m) += w * (f[n] * f[m] - f0[n] * f0[m]);
  }
  const double k = grid.k_max;
  const double pv = std::log((k + q0) / (k - q0)) / q0;
  for (int n = 0; n < dim; ++n)
    for (int m = n; m < dim; ++m) {
      g(n, m) += f0[n] * f0[m] * pv;
      g(m, n) = g(n, m);
    }
  return g;
}

} // namespace

MomentumGrid make_momentum_grid(double k0_fm, double k_max_fm,
                                int nodes_per_panel) {
  if (!(k0_fm > 0.0) || !(k0_fm < k_max_fm))
    throw std::invalid_argument("make_momentum_grid: need 0 < k0 < k_max");
  if (nodes_per_panel < 16)
    throw std::invalid_argument("make_momentum_grid: at least 16 nodes per panel");
  std::vector<double> breaks = {0.0, k0_fm, k_max_fm};
  for (double b : {2.0 * k0_fm, 0.125 * k_max_fm, 0.25 * k_max_fm, 0.5 * k_max_fm})
    if (b > 0.0 && b < k_max_fm)
      breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12 * b; }),
               breaks.end());
  const auto rule = composite_gauss_legendre(breaks, nodes_per_panel);
  MomentumGrid grid;
  grid.nodes = rule.nodes;
  grid.weights = rule.weights;
  grid.k0 = k0_fm;
  grid.k_max = k_max_fm;
  return grid;
}

double momentum_form_factor(const OscillatorBasis &basis, int n, double k_fm) {
  if (n < 0)
    throw std::invalid_argument("momentum_form_factor: negative index");
  if (k_fm < 0.0)
    throw std::invalid_argument("momentum_form_factor: negative momentum");
  const double r0 = basis.r0();
  return std::sqrt(r0) * momentum_functions(basis.l(), n, k_fm * r0)[n];
}

double solve_tmatrix(const SeparablePotential &potential, double energy_mev,
                     const OracleOptions &options) {
  if (!(energy_mev > 0.0))
    throw std::invalid_argument("solve_tmatrix: energy must be positive");
  const auto &basis = potential.basis();
  const int dim = potential.rank_index() + 1;
  const double hw = basis.hbar_omega();
  // Dimensionless: E = q0^2 / 2 in units of hbar*omega, q = k r0.
  const double q0 = std::sqrt(2.0 * energy_mev / hw);
  const double q_max = std::max(options.k_max_r0, 4.0 * q0);
  const Eigen::MatrixXd v = potential.v_mev() / hw;
  const auto f0 = momentum_functions(basis.l(), dim - 1, q0);
  Eigen::VectorXd phi0(dim);
  for (int n = 0; n < dim; ++n)
    phi0(n) = f0[n];

  auto delta_at = [&](int nodes) {
    const auto grid = make_momentum_grid(q0, q_max, nodes);
    const Eigen::MatrixXd g = green_matrix(basis.l(), dim, q0, grid);
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(dim, dim) - v * g;
    const Eigen::MatrixXd kappa = a.fullPivLu().solve(v);
    const double k_on = phi0.dot(kappa * phi0);
    // tan(delta) = -pi K(q0, q0) / q0 for H0 = q^2/2.
    double delta = std::atan(-kPi * k_on / q0);
    return delta;
  };

  double prev = delta_at(options.initial_nodes);
  for (int nodes = 2 * options.initial_nodes; nodes <= options.max_nodes;
       nodes *= 2) {
    const double cur = delta_at(nodes);
    double diff = std::abs(cur - prev);
    diff = std::min(diff, kPi - diff);
    if (diff < options.tolerance)
      return cur;
    prev = cur;
  }
  std::ostringstream msg;
  msg << "solve_tmatrix: quadrature refinement did not converge at E = "
      << energy_mev << " MeV";
  throw NumericalError(msg.str());
}

} // namespace jmis
