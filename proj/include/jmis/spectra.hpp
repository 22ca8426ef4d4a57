#pragma once
#include <jmis/jmatrix.hpp>

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace jmis {

struct BoundStatePole;

enum class IsolatedStateKind {
  //! E > 0: bound state embedded in the continuum
  bsec,
  negative_energy,
};

const char *to_string(IsolatedStateKind kind);

//! Bound state of the truncated Hamiltonian that is decoupled from the
//! kinetic tail, so it has finite support 0..N and no S-matrix pole.
struct IsolatedStateRecord {
  double energy_mev = 0.0;
  //! alpha_0..alpha_N, unit norm. Empty when degeneracy_guard is set.
  Eigen::VectorXd coefficients;
  IsolatedStateKind kind = IsolatedStateKind::bsec;
  //! Set for a cluster of (near-)degenerate eigenvalues on which detection
  //! refused to decide; energy_mev is then the cluster mean.
  bool degeneracy_guard = false;
};

struct DetectionTolerances {
  //! Common-eigenvalue tolerance in hbar*omega.
  double eigenvalue_hw = 1e-8;
  //! Bound on |U^mu_N| for a decoupled eigenvector.
  double last_component = 1e-7;
};

//! Isolated states of the truncated Hamiltonian: eigenvalues of H^N shared
//! with its principal minor H^{N-1}, cross-checked against U^mu_N = 0.
//! Throws NumericalError when the two tests disagree.
std::vector<IsolatedStateRecord>
detect_isolated_states(const TruncatedHamiltonian &ham,
                       const DetectionTolerances &tol = {});

struct BlockStructureReport {
  bool ok = false;
  //! <alpha|H|alpha> in MeV.
  double energy_mev = 0.0;
  //! |((H - E) alpha)_j| for j = 0..N, MeV.
  std::vector<double> couplings_mev;
  //! |alpha_N T_{N,N+1}|, the coupling to the kinetic tail, MeV.
  double tail_coupling_mev = 0.0;
  double max_residual_mev = 0.0;
};

//! Checks that the IS vector spans an invariant block of the full (infinite)
//! Hamiltonian matrix. tolerance_hw is in units of hbar*omega.
BlockStructureReport verify_block_structure(const TruncatedHamiltonian &ham,
                                            const IsolatedStateRecord &record,
                                            double tolerance_hw = 1e-10);

//! H' = H + lambda |Psi><Psi| with Psi given in the oscillator basis.
struct ProjectorShift {
  ProjectorShift(Eigen::VectorXd target, double lambda_mev);

  const Eigen::VectorXd &target() const { return target_; }
  double lambda_mev() const { return lambda_; }

private:
  Eigen::VectorXd target_;
  double lambda_;
};

//! V'_nn' = V_nn' + lambda Psi_n Psi_n'. Rejects targets with support beyond
//! index N.
SeparablePotential apply_projector_shift(const SeparablePotential &potential,
                                         const ProjectorShift &shift);

//! Number of conventional bound states plus isolated states. Records flagged
//! by the degeneracy guard are not counted.
int levinson_count(std::span<const BoundStatePole> poles,
                   std::span<const IsolatedStateRecord> isolated);

} // namespace jmis
