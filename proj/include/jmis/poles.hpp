#pragma once
#include <jmis/jmatrix.hpp>

#include <limits>
#include <span>
#include <string>
#include <vector>

namespace jmis {

//! S-matrix pole on the negative energy axis, p = i*kappa.
struct BoundStatePole {
  double energy_mev = 0.0;
  double kappa = 0.0;
  //! |g(E)| / (scale of the terms in g) at the polished root.
  double residual = 0.0;
  //! Filled by bound_wavefunction when requested.
  std::vector<double> coefficients;
  double rms_relative_fm = std::numeric_limits<double>::quiet_NaN();
  double rms_half_fm = std::numeric_limits<double>::quiet_NaN();
};

struct PoleSearchWindow {
  double e_min_hw = -0.5;
  double e_max_hw = -1e-6;
  int mesh_points = 200;
};

//! Default window widened, when needed, down to the lowest eigenvalue of the
//! strength matrix, below which T + V has no spectrum.
PoleSearchWindow spectral_window(const TruncatedHamiltonian &ham);

//! i^l [C+_0 A' - p V11 / (pi S_0)] in hbar*omega units for a rank-2
//! potential with H01 = 0; real on the negative energy axis.
double pole_function_rank2(const Rank2Parameters &params, double energy_mev);

//! i^l [prod'(eps_mu - E) C+_N + T_{N,N+1} prod'(lambda_nu - E) C+_{N+1}],
//! where eps and lambda are the eigenvalues of H^N and its minor, with the
//! common (isolated-state) eigenvalues removed from both products.
double pole_function(const TruncatedHamiltonian &ham, double energy_mev);

//! Roots of pole_function_rank2; requires beta = 0.
std::vector<BoundStatePole>
find_bound_poles(const Rank2Parameters &params, const PoleSearchWindow &window = {},
                 std::vector<std::string> *warnings = nullptr);

//! Roots of pole_function for any rank.
std::vector<BoundStatePole>
find_bound_poles(const TruncatedHamiltonian &ham,
                 const PoleSearchWindow &window = {},
                 std::vector<std::string> *warnings = nullptr);

//! Normalized coefficients X_0..X_{n_max}. n_max starts at n_max_initial and
//! doubles until |X_{n_max}| <= 1e-8; throws NumericalError past the cap.
std::vector<double> bound_wavefunction(const BoundStatePole &pole,
                                       const TruncatedHamiltonian &ham,
                                       int n_max_initial = 64);

struct RmsRadius {
  double relative_fm = 0.0;
  double half_fm = 0.0;
  //! Share of <r^2> carried by the two last coefficients.
  double tail_fraction = 0.0;
  bool precision_warning = false;
};

RmsRadius rms_radius(std::span<const double> coefficients,
                     const OscillatorBasis &basis);

//! Sign changes of sum_n X_n phi_n(r) on (0, r_max], ignoring values below
//! 1e-6 of the maximum modulus.
int count_nodes(std::span<const double> coefficients,
                const OscillatorBasis &basis, double r_max_fm,
                int points = 2000);

//! Wavefunction coefficients and rms radii attached to each pole.
void attach_wavefunctions(std::vector<BoundStatePole> &poles,
                          const TruncatedHamiltonian &ham,
                          std::vector<std::string> *warnings = nullptr);

struct ResonanceTrack {
  double beta_hw2 = 0.0;
  double energy_mev = 0.0;
  double width_mev = 0.0;
};

struct BetaScanCurve {
  double beta_hw2 = 0.0;
  std::vector<double> energies_mev;
  std::vector<double> phase_shifts;
};

struct BetaScanResult {
  std::vector<ResonanceTrack> tracks;
  std::vector<BetaScanCurve> curves;
};

//! Resonance near eps0 for beta > 0: maximum of d(delta)/dE and
//! Gamma = 2 / max(d(delta)/dE).
ResonanceTrack locate_resonance(const Rank2Parameters &params);

//! Phase-shift curves and resonance tracks for each beta (hbar*omega^2
//! units). Curves are sampled on the given grid plus points around each
//! resonance and unwrapped from the top of the grid. beta = 0 uses the
//! cancelled closed form and reports E_r = eps0, Gamma = 0.
BetaScanResult beta_scan(const Rank2Parameters &base,
                         std::span<const double> betas_hw2,
                         std::span<const double> energies_mev);

} // namespace jmis
