#include <jmis/poles.hpp>

#include <jmis/errors.hpp>
#include <jmis/spectra.hpp>

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace jmis {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr int kMaxWavefunctionSize = 1 << 17;

cplx i_pow(int l) {
  static const cplx table[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return table[l % 4];
}

struct PoleValue {
  double value;
  double scale;
};

PoleValue rank2_value(const Rank2Parameters &prm, double energy_mev) {
  const double hw = prm.basis.hbar_omega();
  const double e = energy_mev / hw;
  const double v11 = prm.v11_mev / hw;
  const double t00 = prm.basis.kinetic_hw(0, 0);
  const double t01 = prm.basis.kinetic_hw(0, 1);
  const Momentum p = Momentum::from_energy_hw(e);
  const JSolutionTable sc(prm.basis, p, 0);
  const double a = v11 * (t00 - e) + t01 * t01;
  const cplx term1 = sc.c_pm(0, +1) * a;
  const cplx term2 = p.value() * v11 / (kPi * sc.s(0));
  const cplx il = i_pow(prm.basis.l());
  return {(il * (term1 - term2)).real(),
          std::max(std::abs(term1), std::abs(term2))};
}

// Eigenvalues of H^N and of its minor with matched isolated-state pairs
// removed.
struct ReducedSpectra {
  std::vector<double> eps;
  std::vector<double> lambda;
};

ReducedSpectra reduced_spectra(const TruncatedHamiltonian &ham) {
  const int big_n = ham.rank_index();
  ReducedSpectra out;
  for (Eigen::Index i = 0; i < ham.eigenvalues_hw().size(); ++i)
    out.eps.push_back(ham.eigenvalues_hw()(i));
  if (big_n > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> minor(
        ham.matrix_hw().topLeftCorner(big_n, big_n), Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < minor.eigenvalues().size(); ++i)
      out.lambda.push_back(minor.eigenvalues()(i));
  }
  const double hw = ham.basis().hbar_omega();
  for (const auto &rec : detect_isolated_states(ham)) {
    if (rec.degeneracy_guard)
      continue;
    const double e = rec.energy_mev / hw;
    auto nearest = [e](std::vector<double> &v) {
      return std::min_element(v.begin(), v.end(), [e](double a, double b) {
        return std::abs(a - e) < std::abs(b - e);
      });
    };
    if (out.lambda.empty())
      continue;
    out.eps.erase(nearest(out.eps));
    out.lambda.erase(nearest(out.lambda));
  }
  return out;
}

PoleValue general_value(const TruncatedHamiltonian &ham,
                        const ReducedSpectra &reduced, double energy_mev) {
  const int big_n = ham.rank_index();
  const double e = energy_mev / ham.basis().hbar_omega();
  const JSolutionTable sc(ham.basis(), Momentum::from_energy_hw(e), big_n + 1);
  double prod_eps = 1.0, prod_lambda = 1.0;
  for (double v : reduced.eps)
    prod_eps *= v - e;
  for (double v : reduced.lambda)
    prod_lambda *= v - e;
  const cplx term1 = prod_eps * sc.c_pm(big_n, +1);
  const cplx term2 = ham.basis().kinetic_hw(big_n, big_n + 1) * prod_lambda *
                     sc.c_pm(big_n + 1, +1);
  const cplx il = i_pow(ham.basis().l());
  return {(il * (term1 + term2)).real(),
          std::max(std::abs(term1), std::abs(term2))};
}

template <class Fn>
std::vector<BoundStatePole> bracket_roots(Fn &&value, double hw,
                                          const PoleSearchWindow &w,
                                          std::vector<std::string> *warnings) {
  if (!(w.e_min_hw < w.e_max_hw) || !(w.e_max_hw < 0.0) || w.mesh_points < 2)
    throw std::invalid_argument(
        "find_bound_poles: window must satisfy e_min < e_max < 0");
  const int m = w.mesh_points;
  const double lo = std::log(-w.e_min_hw), hi = std::log(-w.e_max_hw);
  std::vector<double> mesh(m), g(m);
  for (int k = 0; k < m; ++k) {
    mesh[k] = -std::exp(lo + (hi - lo) * k / (m - 1));
    g[k] = value(mesh[k] * hw).value;
  }

  std::vector<BoundStatePole> out;
  auto record = [&](double e_hw, int interval) {
    BoundStatePole pole;
    pole.energy_mev = e_hw * hw;
    pole.kappa = std::sqrt(-2.0 * e_hw);
    const auto v = value(pole.energy_mev);
    pole.residual = v.scale > 0.0 ? std::abs(v.value) / v.scale : 0.0;
    out.push_back(std::move(pole));
    if (warnings && (interval == 0 || interval == m - 2)) {
      std::ostringstream msg;
      msg << "pole at " << e_hw * hw
          << " MeV lies at the edge of the search window; widen the window";
      warnings->push_back(msg.str());
    }
  };

  for (int k = 0; k + 1 < m; ++k) {
    if (g[k] == 0.0) {
      record(mesh[k], k);
      continue;
    }
    if (g[k] * g[k + 1] >= 0.0)
      continue;
    auto f = [&](double e_hw) { return value(e_hw * hw).value; };
    std::uintmax_t iters = 200;
    const auto root = boost::math::tools::toms748_solve(
        f, mesh[k], mesh[k + 1], g[k], g[k + 1],
        boost::math::tools::eps_tolerance<double>(48), iters);
    record(0.5 * (root.first + root.second), k);
  }
  if (g[m - 1] == 0.0)
    record(mesh[m - 1], m - 2);
  return out;
}

double wrap_half_pi(double d) {
  while (d > 0.5 * kPi)
    d -= kPi;
  while (d <= -0.5 * kPi)
    d += kPi;
  return d;
}

} // namespace

PoleSearchWindow spectral_window(const TruncatedHamiltonian &ham) {
  PoleSearchWindow w;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> v(
      ham.potential().v_mev() / ham.basis().hbar_omega(), Eigen::EigenvaluesOnly);
  w.e_min_hw = std::min(w.e_min_hw, 1.05 * v.eigenvalues()(0));
  return w;
}

double pole_function_rank2(const Rank2Parameters &params, double energy_mev) {
  return rank2_value(params, energy_mev).value;
}

double pole_function(const TruncatedHamiltonian &ham, double energy_mev) {
  return general_value(ham, reduced_spectra(ham), energy_mev).value;
}

std::vector<BoundStatePole>
find_bound_poles(const Rank2Parameters &params, const PoleSearchWindow &window,
                 std::vector<std::string> *warnings) {
  if (params.beta_mev2 != 0.0)
    throw std::invalid_argument(
        "find_bound_poles: rank-2 pole equation requires beta = 0");
  return bracket_roots(
      [&](double e_mev) { return rank2_value(params, e_mev); },
      params.basis.hbar_omega(), window, warnings);
}

std::vector<BoundStatePole>
find_bound_poles(const TruncatedHamiltonian &ham, const PoleSearchWindow &window,
                 std::vector<std::string> *warnings) {
  const auto reduced = reduced_spectra(ham);
  return bracket_roots(
      [&](double e_mev) { return general_value(ham, reduced, e_mev); },
      ham.basis().hbar_omega(), window, warnings);
}

std::vector<double> bound_wavefunction(const BoundStatePole &pole,
                                       const TruncatedHamiltonian &ham,
                                       int n_max_initial) {
  if (!(pole.energy_mev < 0.0))
    throw std::invalid_argument("bound_wavefunction: pole energy must be negative");
  const int big_n = ham.rank_index();
  const double e_hw = pole.energy_mev / ham.basis().hbar_omega();
  const Momentum p = Momentum::from_energy_hw(e_hw);
  const cplx il = i_pow(ham.basis().l());

  for (int n_max = std::max(n_max_initial, big_n + 2);; n_max *= 2) {
    if (n_max > kMaxWavefunctionSize) {
      std::ostringstream msg;
      msg << "bound_wavefunction: tail not decayed below 1e-8 within n_max = "
          << kMaxWavefunctionSize << "; increase n_max";
      throw NumericalError(msg.str());
    }
    const auto cplus = outgoing_solution_table(ham.basis(), p, n_max);
    std::vector<double> x(n_max + 1);
    for (int n = big_n; n <= n_max; ++n)
      x[n] = (il * cplus[n]).real();
    for (int n = 0; n < big_n; ++n)
      x[n] = p_matrix(ham, n, big_n, pole.energy_mev) * x[big_n + 1];

    double norm = 0.0;
    for (double v : x)
      norm += v * v;
    norm = std::sqrt(norm);
    // Positive tail: phi_n carries (-1)^n.
    const double sign = ((big_n + 1) % 2 == 0) == (x[big_n + 1] > 0.0) ? 1.0 : -1.0;
    for (double &v : x)
      v *= sign / norm;
    if (std::abs(x[n_max]) <= 1e-8)
      return x;
  }
}

RmsRadius rms_radius(std::span<const double> coefficients,
                     const OscillatorBasis &basis) {
  const int n_max = static_cast<int>(coefficients.size()) - 1;
  if (n_max < 0)
    throw std::invalid_argument("rms_radius: empty coefficient vector");
  double total = 0.0, tail = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    double term = coefficients[n] * coefficients[n] * r2_matrix_element(basis, n, n);
    if (n < n_max)
      term += 2.0 * coefficients[n] * coefficients[n + 1] *
              r2_matrix_element(basis, n, n + 1);
    total += term;
    if (n >= n_max - 1)
      tail += std::abs(term);
  }
  RmsRadius out;
  out.relative_fm = std::sqrt(total);
  out.half_fm = 0.5 * out.relative_fm;
  out.tail_fraction = total > 0.0 ? tail / total : 0.0;
  out.precision_warning = out.tail_fraction > 1e-6;
  return out;
}

int count_nodes(std::span<const double> coefficients,
                const OscillatorBasis &basis, double r_max_fm, int points) {
  const int n_max = static_cast<int>(coefficients.size()) - 1;
  std::vector<double> u(points);
  double peak = 0.0;
  for (int i = 0; i < points; ++i) {
    const double r = r_max_fm * (i + 1) / points;
    const auto phi = form_factor_table(basis, n_max, r);
    double s = 0.0;
    for (int n = 0; n <= n_max; ++n)
      s += coefficients[n] * phi[n];
    u[i] = s;
    peak = std::max(peak, std::abs(s));
  }
  int nodes = 0;
  double last_sign = 0.0;
  for (double v : u) {
    if (std::abs(v) <= 1e-6 * peak)
      continue;
    const double sgn = v > 0.0 ? 1.0 : -1.0;
    if (last_sign != 0.0 && sgn != last_sign)
      ++nodes;
    last_sign = sgn;
  }
  return nodes;
}

void attach_wavefunctions(std::vector<BoundStatePole> &poles,
                          const TruncatedHamiltonian &ham,
                          std::vector<std::string> *warnings) {
  for (auto &pole : poles) {
    pole.coefficients = bound_wavefunction(pole, ham);
    const auto rms = rms_radius(pole.coefficients, ham.basis());
    pole.rms_relative_fm = rms.relative_fm;
    pole.rms_half_fm = rms.half_fm;
    if (warnings && rms.precision_warning) {
      std::ostringstream msg;
      msg << "rms radius of pole at " << pole.energy_mev
          << " MeV: tail share " << rms.tail_fraction << " exceeds 1e-6";
      warnings->push_back(msg.str());
    }
  }
}

ResonanceTrack locate_resonance(const Rank2Parameters &params) {
  if (!(params.beta_mev2 > 0.0))
    throw std::invalid_argument("locate_resonance: beta must be positive");
  const double hw = params.basis.hbar_omega();
  const double eps0 = params.eps0_mev / hw;
  auto parts = [&](double e_hw) {
    return rank2_phase_parts(params, e_hw * hw, false);
  };

  // Bracket the zero of the cosine part closest to eps0.
  std::vector<double> probe;
  for (int j = 0; j <= 48; ++j) {
    const double s = std::pow(10.0, -12.0 + 0.25 * j);
    probe.push_back(eps0 + s);
    if (eps0 - s > 0.0)
      probe.push_back(eps0 - s);
  }
  std::sort(probe.begin(), probe.end());
  double best_a = 0.0, best_b = 0.0, best_dist = HUGE_VAL;
  for (std::size_t k = 0; k + 1 < probe.size(); ++k) {
    const double ca = parts(probe[k]).cosine, cb = parts(probe[k + 1]).cosine;
    if (ca * cb > 0.0)
      continue;
    const double dist = std::abs(0.5 * (probe[k] + probe[k + 1]) - eps0);
    if (dist < best_dist) {
      best_dist = dist;
      best_a = probe[k];
      best_b = probe[k + 1];
    }
  }
  if (best_dist == HUGE_VAL)
    throw NumericalError("beta_scan: resonance not bracketed near eps0; "
                         "refine the grid");
  std::uintmax_t iters = 200;
  const auto root = boost::math::tools::toms748_solve(
      [&](double e) { return parts(e).cosine; }, best_a, best_b,
      boost::math::tools::eps_tolerance<double>(50), iters);
  const double e_c = 0.5 * (root.first + root.second);

  const double h0 = 1e-7 * std::max(1.0, eps0);
  const double dcos = (parts(e_c + h0).cosine - parts(e_c - h0).cosine) / (2 * h0);
  const double gamma0 = 2.0 * std::abs(parts(e_c).sine / dcos);

  auto principal = [&](double e_hw) {
    return phase_shift_rank2(params, e_hw * hw);
  };
  const double h = gamma0 / 200.0;
  auto slope = [&](double e) {
    auto d = [&](double step) {
      return wrap_half_pi(principal(e + step) - principal(e - step)) / (2 * step);
    };
    return (4.0 * d(0.5 * h) - d(h)) / 3.0;
  };

  // Golden-section maximization of d(delta)/dE.
  constexpr double kInvPhi = 0.6180339887498949;
  double a = std::max(e_c - 4.0 * gamma0, 0.5 * e_c), b = e_c + 4.0 * gamma0;
  double x1 = b - kInvPhi * (b - a), x2 = a + kInvPhi * (b - a);
  double f1 = slope(x1), f2 = slope(x2);
  while (b - a > 1e-7 * gamma0) {
    if (f1 > f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = slope(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = slope(x2);
    }
  }
  const double e_r = 0.5 * (a + b);
  const double peak = slope(e_r);
  if (!(peak > 0.0))
    throw NumericalError("beta_scan: phase shift does not rise through the "
                         "resonance");
  ResonanceTrack track;
  track.beta_hw2 = params.beta_mev2 / (hw * hw);
  track.energy_mev = e_r * hw;
  track.width_mev = 2.0 / peak * hw;
  return track;
}

BetaScanResult beta_scan(const Rank2Parameters &base,
                         std::span<const double> betas_hw2,
                         std::span<const double> energies_mev) {
  if (!(base.eps0_mev > 0.0) || !(base.v11_mev > 0.0))
    throw std::invalid_argument("beta_scan: requires eps0 > 0 and V11 > 0");
  const double hw = base.basis.hbar_omega();
  BetaScanResult out;
  for (double beta : betas_hw2) {
    if (beta < 0.0)
      throw std::invalid_argument("beta_scan: beta must be non-negative");
    Rank2Parameters prm = base;
    prm.beta_mev2 = beta * hw * hw;

    ResonanceTrack track{beta, prm.eps0_mev, 0.0};
    if (beta > 0.0)
      track = locate_resonance(prm);

    // Resolve the resonance on the grid so the unwrapping sees every step.
    std::vector<double> grid(energies_mev.begin(), energies_mev.end());
    const double half_width = std::max(0.5 * track.width_mev, 1e-9 * hw);
    grid.push_back(track.energy_mev);
    for (double x = 0.5; x * half_width < hw; x *= 2.0) {
      grid.push_back(track.energy_mev + x * half_width);
      grid.push_back(track.energy_mev - x * half_width);
    }
    std::erase_if(grid, [](double e) { return !(e > 0.0); });
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(),
                           [](double a, double b) {
                             return std::abs(a - b) <= 1e-14 * std::abs(b);
                           }),
               grid.end());

    std::function<double(double)> principal;
    if (beta > 0.0)
      principal = [prm](double e) { return phase_shift_rank2(prm, e); };
    else
      principal = [prm](double e) { return phase_shift_rank2_is(prm, e); };

    BetaScanCurve curve;
    curve.beta_hw2 = beta;
    curve.phase_shifts = unwrap_phase_curve(principal, grid, BranchAnchor::highest);
    curve.energies_mev = std::move(grid);
    out.curves.push_back(std::move(curve));
    out.tracks.push_back(track);
  }
  return out;
}

} // namespace jmis
