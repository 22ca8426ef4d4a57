#include <jmis/jmatrix.hpp>

#include <jmis/errors.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace jmis {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

double reduce_principal(double delta) {
  while (delta > 0.5 * kPi)
    delta -= kPi;
  while (delta <= -0.5 * kPi)
    delta += kPi;
  return delta;
}

void require_positive_energy(double energy_mev, const char *what) {
  if (!(energy_mev > 0.0))
    throw std::invalid_argument(std::string(what) +
                                ": energy must be positive");
}

// Scaled "sine" and "cosine" parts of the asymptotic solution, such that
// tan(delta) = sine / cosine.
struct AsymptoticParts {
  double sine;
  double cosine;
};

AsymptoticParts general_parts(const TruncatedHamiltonian &ham,
                              double energy_mev) {
  const int big_n = ham.rank_index();
  const double p_nn = p_matrix(ham, big_n, big_n, energy_mev);
  const double e_hw = energy_mev / ham.basis().hbar_omega();
  const JSolutionTable sc(ham.basis(), Momentum::from_energy_hw(e_hw),
                          big_n + 1);
  // S_n = exp(-x/2) s_n, C_n = exp(x/2) c_n, so the ratio carries exp(-x).
  const double num =
      (sc.s_scaled(big_n) - p_nn * sc.s_scaled(big_n + 1)).real();
  const double den =
      (sc.c_scaled(big_n) - p_nn * sc.c_scaled(big_n + 1)).real();
  return {-std::exp(-2.0 * sc.half_x()) * num, den};
}

// Closed rank-2 forms in hbar*omega units. With is_limit the (eps0 - E)
// factor shared by every term is removed analytically.
struct Rank2Parts {
  double sine;
  double cosine;
  double a;
  double b_term;
  double damping; // exp(-x)
  double s0_scaled;
  double c0_scaled;
};

Rank2Parts rank2_parts(const Rank2Parameters &prm, double energy_mev,
                       bool is_limit) {
  const double hw = prm.basis.hbar_omega();
  const double e = energy_mev / hw;
  const double eps0 = prm.eps0_mev / hw;
  const double beta = prm.beta_mev2 / (hw * hw);
  const double v11 = prm.v11_mev / hw;
  const double t00 = prm.basis.kinetic_hw(0, 0);
  const double t01 = prm.basis.kinetic_hw(0, 1);
  const int l = prm.basis.l();

  double a, b;
  if (is_limit) {
    a = v11 * (t00 - e) + t01 * t01;
    b = v11;
  } else {
    b = v11 * (eps0 - e) - beta;
    a = b * (t00 - e) + t01 * t01 * (eps0 - e);
  }

  const Momentum p = Momentum::from_energy_hw(e);
  const JSolutionTable sc(prm.basis, p, 0);
  const double pv = p.value().real();
  const double s0 = sc.s_scaled(0).real();
  const double c0 = sc.c_scaled(0).real();
  // p / S0 in scaled form: S0 = sqrt(2) p^{l+1} / sqrt(Gamma(l+3/2)) e^{-x/2}
  const double p_over_s0 =
      std::pow(pv, -l) * std::sqrt(std::tgamma(l + 1.5) / 2.0);
  const double damping = std::exp(-2.0 * sc.half_x());
  const double b_term = b * p_over_s0 / kPi;

  Rank2Parts parts{};
  parts.sine = -damping * s0 * a;
  parts.cosine = c0 * a - b_term;
  parts.a = a;
  parts.b_term = b_term;
  parts.damping = damping;
  parts.s0_scaled = s0;
  parts.c0_scaled = c0;
  return parts;
}

cplx rank2_s_matrix(const Rank2Parts &r) {
  const cplx i(0.0, 1.0);
  const cplx minus = (r.c0_scaled - i * r.damping * r.s0_scaled) * r.a - r.b_term;
  const cplx plus = (r.c0_scaled + i * r.damping * r.s0_scaled) * r.a - r.b_term;
  return minus / plus;
}

} // namespace

SeparablePotential::SeparablePotential(OscillatorBasis basis,
                                       Eigen::MatrixXd v_mev)
    : basis_(basis), v_(std::move(v_mev)) {
  if (v_.rows() == 0 || v_.rows() != v_.cols())
    throw std::invalid_argument(
        "SeparablePotential: strength matrix must be square and non-empty");
  for (Eigen::Index i = 0; i < v_.rows(); ++i)
    for (Eigen::Index j = i + 1; j < v_.cols(); ++j)
      if (v_(i, j) != v_(j, i)) {
        std::ostringstream msg;
        msg << "SeparablePotential: strength matrix not symmetric at (" << i
            << "," << j << ")";
        throw std::invalid_argument(msg.str());
      }
}

SeparablePotential SeparablePotential::zero(OscillatorBasis basis,
                                            int rank_index) {
  if (rank_index < 0)
    throw std::invalid_argument("SeparablePotential::zero: negative rank index");
  return {basis, Eigen::MatrixXd::Zero(rank_index + 1, rank_index + 1)};
}

TruncatedHamiltonian::TruncatedHamiltonian(SeparablePotential potential)
    : potential_(std::move(potential)) {
  const int dim = potential_.rank_index() + 1;
  const auto &b = potential_.basis();
  h_ = potential_.v_mev() / b.hbar_omega();
  for (int n = 0; n < dim; ++n) {
    h_(n, n) += b.kinetic_hw(n, n);
    if (n + 1 < dim) {
      h_(n, n + 1) += b.kinetic_hw(n, n + 1);
      h_(n + 1, n) += b.kinetic_hw(n + 1, n);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h_);
  if (solver.info() != Eigen::Success)
    throw NumericalError("TruncatedHamiltonian: eigen-decomposition failed");
  eps_ = solver.eigenvalues();
  u_ = solver.eigenvectors();
}

TruncatedHamiltonian build_truncated_hamiltonian(const SeparablePotential &v) {
  return TruncatedHamiltonian(v);
}

double p_matrix(const TruncatedHamiltonian &ham, int n, int np,
                double energy_mev) {
  const int big_n = ham.rank_index();
  if (n < 0 || np < 0 || n > big_n || np > big_n)
    throw std::out_of_range("p_matrix: index outside 0..N");
  const double e = energy_mev / ham.basis().hbar_omega();
  const auto &eps = ham.eigenvalues_hw();
  const auto &u = ham.eigenvectors();
  const bool touches_last = (n == big_n || np == big_n);

  double sum = 0.0;
  for (Eigen::Index mu = 0; mu < eps.size(); ++mu) {
    // Decoupled (isolated) eigenvectors contribute exactly zero to P_nN.
    if (touches_last && std::abs(u(big_n, mu)) <= kDecoupledComponent)
      continue;
    const double gap = eps(mu) - e;
    if (std::abs(gap) < kPoleProximityHw) {
      std::ostringstream msg;
      msg << "p_matrix: E = " << energy_mev
          << " MeV lies on eigenvalue " << eps(mu) * ham.basis().hbar_omega()
          << " MeV of the truncated Hamiltonian; offset the grid point";
      throw PoleProximityError(msg.str(),
                               eps(mu) * ham.basis().hbar_omega());
    }
    sum += u(n, mu) * u(np, mu) / gap;
  }
  return -sum * ham.basis().kinetic_hw(np, np + 1);
}

double phase_shift(const TruncatedHamiltonian &ham, double energy_mev) {
  require_positive_energy(energy_mev, "phase_shift");
  const auto parts = general_parts(ham, energy_mev);
  return reduce_principal(std::atan2(parts.sine, parts.cosine));
}

std::complex<double> s_matrix_general(const TruncatedHamiltonian &ham,
                                      double energy_mev) {
  require_positive_energy(energy_mev, "s_matrix_general");
  const auto parts = general_parts(ham, energy_mev);
  const cplx num(parts.cosine, parts.sine);
  const cplx den(parts.cosine, -parts.sine);
  return num / den;
}

std::vector<double> coefficients(const TruncatedHamiltonian &ham,
                                 double energy_mev, int n_max) {
  require_positive_energy(energy_mev, "coefficients");
  const int big_n = ham.rank_index();
  if (n_max < big_n + 1)
    throw std::invalid_argument("coefficients: n_max must be at least N+1");
  const double delta = phase_shift(ham, energy_mev);
  const double e_hw = energy_mev / ham.basis().hbar_omega();
  const JSolutionTable sc(ham.basis(), Momentum::from_energy_hw(e_hw), n_max);

  std::vector<double> x(n_max + 1);
  const double cd = std::cos(delta), sd = std::sin(delta);
  for (int n = big_n; n <= n_max; ++n)
    x[n] = sc.s(n).real() * cd + sc.c(n).real() * sd;
  for (int n = 0; n < big_n; ++n)
    x[n] = p_matrix(ham, n, big_n, energy_mev) * x[big_n + 1];
  return x;
}

Rank2Parameters Rank2Parameters::from_potential(const SeparablePotential &v) {
  if (v.rank_index() != 1)
    throw std::invalid_argument("Rank2Parameters: potential must have N = 1");
  Rank2Parameters prm{v.basis()};
  prm.eps0_mev = prm.t00_mev() + v.v_mev(0, 0);
  const double h01 = prm.t01_mev() + v.v_mev(0, 1);
  prm.beta_mev2 = h01 * h01;
  prm.v11_mev = v.v_mev(1, 1);
  return prm;
}

SeparablePotential Rank2Parameters::to_potential() const {
  if (beta_mev2 < 0.0)
    throw std::invalid_argument("Rank2Parameters: beta must be non-negative");
  Eigen::Matrix2d v;
  const double v01 = std::sqrt(beta_mev2) - t01_mev();
  v << eps0_mev - t00_mev(), v01, v01, v11_mev;
  return {basis, v};
}

PhaseParts rank2_phase_parts(const Rank2Parameters &params, double energy_mev,
                             bool cancelled) {
  require_positive_energy(energy_mev, "rank2_phase_parts");
  const auto r = rank2_parts(params, energy_mev, cancelled);
  return {r.sine, r.cosine};
}

double tan_delta_rank2(const Rank2Parameters &params, double energy_mev) {
  require_positive_energy(energy_mev, "tan_delta_rank2");
  const auto r = rank2_parts(params, energy_mev, false);
  if (r.cosine == 0.0)
    return std::copysign(std::numeric_limits<double>::infinity(), r.sine);
  return r.sine / r.cosine;
}

double phase_shift_rank2(const Rank2Parameters &params, double energy_mev) {
  require_positive_energy(energy_mev, "phase_shift_rank2");
  const auto r = rank2_parts(params, energy_mev, false);
  return reduce_principal(std::atan2(r.sine, r.cosine));
}

double phase_shift_rank2_is(const Rank2Parameters &params, double energy_mev) {
  require_positive_energy(energy_mev, "phase_shift_rank2_is");
  const auto r = rank2_parts(params, energy_mev, true);
  return reduce_principal(std::atan2(r.sine, r.cosine));
}

std::complex<double> s_matrix_rank2(const Rank2Parameters &params,
                                    double energy_mev) {
  require_positive_energy(energy_mev, "s_matrix_rank2");
  return rank2_s_matrix(rank2_parts(params, energy_mev, false));
}

std::complex<double> s_matrix_rank2_is(const Rank2Parameters &params,
                                       double energy_mev) {
  require_positive_energy(energy_mev, "s_matrix_rank2_is");
  return rank2_s_matrix(rank2_parts(params, energy_mev, true));
}

std::vector<double>
unwrap_phase_curve(const std::function<double(double)> &principal_phase,
                   std::span<const double> energies_mev, BranchAnchor anchor) {
  const std::size_t n = energies_mev.size();
  std::vector<double> out(n);
  if (n == 0)
    return out;
  for (std::size_t i = 1; i < n; ++i)
    if (!(energies_mev[i] > energies_mev[i - 1]))
      throw std::invalid_argument("unwrap_phase_curve: grid must be increasing");

  // Continue the branch from (e_from, d_from) to e_to, whose principal value
  // is p_to. Bisects while the step is ambiguous.
  std::function<double(double, double, double, double, int)> track =
      [&](double e_from, double d_from, double e_to, double p_to,
          int depth) -> double {
    const double k = std::round((d_from - p_to) / kPi);
    const double d_to = p_to + k * kPi;
    if (std::abs(d_to - d_from) <= 0.25 * kPi || depth >= 40)
      return d_to;
    const double e_mid = 0.5 * (e_from + e_to);
    const double d_mid =
        track(e_from, d_from, e_mid, principal_phase(e_mid), depth + 1);
    return track(e_mid, d_mid, e_to, p_to, depth + 1);
  };

  if (anchor == BranchAnchor::lowest) {
    out[0] = principal_phase(energies_mev[0]);
    for (std::size_t i = 1; i < n; ++i)
      out[i] = track(energies_mev[i - 1], out[i - 1], energies_mev[i],
                     principal_phase(energies_mev[i]), 0);
  } else {
    out[n - 1] = principal_phase(energies_mev[n - 1]);
    for (std::size_t i = n - 1; i-- > 0;)
      out[i] = track(energies_mev[i + 1], out[i + 1], energies_mev[i],
                     principal_phase(energies_mev[i]), 0);
  }
  return out;
}

ScatteringSolution solve_scattering(const TruncatedHamiltonian &ham,
                                    std::span<const double> energies_mev,
                                    const ScatteringOptions &options) {
  ScatteringSolution sol;
  sol.energies_mev.assign(energies_mev.begin(), energies_mev.end());
  const double shift = 1e-8 * ham.basis().hbar_omega();

  // Evaluation energy for a requested grid point, moved off coupled
  // eigenvalues when needed.
  auto effective = [&](double e) {
    try {
      (void)p_matrix(ham, ham.rank_index(), ham.rank_index(), e);
      return e;
    } catch (const PoleProximityError &err) {
      std::ostringstream msg;
      msg << "grid point " << e << " MeV displaced by " << shift
          << " MeV off eigenvalue " << err.eigenvalue << " MeV";
      sol.warnings.push_back(msg.str());
      return e + shift;
    }
  };

  std::vector<double> eval(energies_mev.size());
  for (std::size_t i = 0; i < eval.size(); ++i)
    eval[i] = effective(energies_mev[i]);

  auto principal = [&](double e) {
    try {
      return phase_shift(ham, e);
    } catch (const PoleProximityError &) {
      return phase_shift(ham, e + shift);
    }
  };
  sol.phase_shifts = unwrap_phase_curve(principal, eval, options.anchor);
  sol.s_matrix.reserve(eval.size());
  for (double e : eval)
    sol.s_matrix.push_back(s_matrix_general(ham, e));
  if (options.coefficients_n_max >= 0)
    for (double e : eval)
      sol.coefficients.push_back(
          coefficients(ham, e, options.coefficients_n_max));
  return sol;
}

} // namespace jmis
