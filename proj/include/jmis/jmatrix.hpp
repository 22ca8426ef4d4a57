#pragma once
#include <jmis/oscillator_basis.hpp>

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace jmis {

//! Rank-(N+1) separable potential sum_{n,n'<=N} V_nn' |phi_n><phi_n'|.
//! Strengths are stored in MeV; the matrix must be exactly symmetric.
class SeparablePotential {
public:
  SeparablePotential(OscillatorBasis basis, Eigen::MatrixXd v_mev);

  static SeparablePotential zero(OscillatorBasis basis, int rank_index);

  const OscillatorBasis &basis() const { return basis_; }
  //! N, the largest form-factor index.
  int rank_index() const { return static_cast<int>(v_.rows()) - 1; }
  const Eigen::MatrixXd &v_mev() const { return v_; }
  double v_mev(int n, int np) const { return v_(n, np); }

private:
  OscillatorBasis basis_;
  Eigen::MatrixXd v_;
};

//! T + V restricted to basis states 0..N, with its eigen-decomposition.
//! Matrix and eigenvalues are kept in units of hbar*omega.
class TruncatedHamiltonian {
public:
  explicit TruncatedHamiltonian(SeparablePotential potential);

  const SeparablePotential &potential() const { return potential_; }
  const OscillatorBasis &basis() const { return potential_.basis(); }
  int rank_index() const { return potential_.rank_index(); }

  const Eigen::MatrixXd &matrix_hw() const { return h_; }
  //! Ascending eigenvalues.
  const Eigen::VectorXd &eigenvalues_hw() const { return eps_; }
  //! Column mu is U^mu.
  const Eigen::MatrixXd &eigenvectors() const { return u_; }

  Eigen::VectorXd eigenvalues_mev() const {
    return eps_ * basis().hbar_omega();
  }

private:
  SeparablePotential potential_;
  Eigen::MatrixXd h_;
  Eigen::VectorXd eps_;
  Eigen::MatrixXd u_;
};

TruncatedHamiltonian build_truncated_hamiltonian(const SeparablePotential &v);

//! Eigenvectors whose last component is below this are treated as
//! decoupled from the kinetic tail: their terms drop out of P_nN.
inline constexpr double kDecoupledComponent = 1e-12;
//! Energies closer than this (in hbar*omega) to a coupled eigenvalue are
//! rejected by p_matrix.
inline constexpr double kPoleProximityHw = 1e-9;

//! P_nn'(E) = -sum_mu U^mu_n U^mu_n' / (eps_mu - E) * T_{n',n'+1}.
//! Throws PoleProximityError when E sits on a coupled eigenvalue.
double p_matrix(const TruncatedHamiltonian &ham, int n, int np,
                double energy_mev);

//! Phase shift on the principal branch (-pi/2, pi/2], E > 0.
double phase_shift(const TruncatedHamiltonian &ham, double energy_mev);

//! exp(2 i delta) built from the outgoing/incoming combinations.
std::complex<double> s_matrix_general(const TruncatedHamiltonian &ham,
                                      double energy_mev);

//! Expansion coefficients X_0..X_{n_max} of the scattering state, normalized
//! as X_n = S_n cos(delta) + C_n sin(delta) in the asymptotic region.
std::vector<double> coefficients(const TruncatedHamiltonian &ham,
                                 double energy_mev, int n_max);

//! Rank-2 (N = 1) potential described through its truncated Hamiltonian:
//! H00 = eps0, H01^2 = beta, and V11. T00 and T01 follow from the basis.
struct Rank2Parameters {
  OscillatorBasis basis;
  double eps0_mev = 0.0;
  double beta_mev2 = 0.0;
  double v11_mev = 0.0;

  double t00_mev() const { return kinetic_matrix_element(basis, 0, 0); }
  double t01_mev() const { return kinetic_matrix_element(basis, 0, 1); }

  static Rank2Parameters from_potential(const SeparablePotential &v);
  //! Realizes H01 = +sqrt(beta).
  SeparablePotential to_potential() const;
};

//! tan(delta) = sine / cosine. Both parts are finite everywhere on E > 0, so
//! their zeros locate delta = 0 and delta = pi/2 without overflow.
struct PhaseParts {
  double sine = 0.0;
  double cosine = 0.0;
};

//! Parts of the rank-2 closed form. With cancelled = true, H01 = 0 is assumed
//! and the factor (eps0 - E) common to both parts is divided out.
PhaseParts rank2_phase_parts(const Rank2Parameters &params, double energy_mev,
                             bool cancelled);

//! Closed-form tan(delta) of a rank-2 potential. Returns +-infinity where the
//! denominator vanishes (delta = pi/2).
double tan_delta_rank2(const Rank2Parameters &params, double energy_mev);
//! Principal-branch phase shift from the same closed form.
double phase_shift_rank2(const Rank2Parameters &params, double energy_mev);
//! Principal-branch phase shift with H01 = 0 and the common (eps0 - E) factor
//! cancelled; regular at E = eps0.
double phase_shift_rank2_is(const Rank2Parameters &params, double energy_mev);

std::complex<double> s_matrix_rank2(const Rank2Parameters &params,
                                    double energy_mev);
//! beta = 0 form; params.beta_mev2 is ignored.
std::complex<double> s_matrix_rank2_is(const Rank2Parameters &params,
                                       double energy_mev);

enum class BranchAnchor {
  //! delta at the lowest grid energy is taken on the principal branch
  lowest,
  //! delta at the highest grid energy is taken on the principal branch;
  //! with a grid reaching far above the interaction scale this realizes
  //! delta(infinity) = 0
  highest,
};

//! Continuous phase-shift branch on a sorted grid. Neighbouring points whose
//! principal values differ by more than pi/4 are bisected (up to a fixed
//! depth) before the multiple of pi is chosen.
std::vector<double>
unwrap_phase_curve(const std::function<double(double)> &principal_phase,
                   std::span<const double> energies_mev,
                   BranchAnchor anchor = BranchAnchor::highest);

struct ScatteringSolution {
  std::vector<double> energies_mev;
  std::vector<double> phase_shifts;
  std::vector<std::complex<double>> s_matrix;
  //! Filled when coefficient output was requested.
  std::vector<std::vector<double>> coefficients;
  std::vector<std::string> warnings;
};

struct ScatteringOptions {
  BranchAnchor anchor = BranchAnchor::highest;
  //! Negative: no coefficient table.
  int coefficients_n_max = -1;
};

//! Phase shifts and S-matrix on a sorted energy grid. Grid points that land
//! on a coupled eigenvalue are displaced by 1e-8 hbar*omega with a warning.
ScatteringSolution solve_scattering(const TruncatedHamiltonian &ham,
                                    std::span<const double> energies_mev,
                                    const ScatteringOptions &options = {});

} // namespace jmis
