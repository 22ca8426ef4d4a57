#include <jmis/spectra.hpp>

#include <jmis/errors.hpp>
#include <jmis/poles.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace jmis {

namespace {

// Groups of consecutive sorted values closer than tol.
std::vector<std::vector<Eigen::Index>> clusters(const Eigen::VectorXd &sorted,
                                                double tol) {
  std::vector<std::vector<Eigen::Index>> out;
  for (Eigen::Index i = 0; i < sorted.size(); ++i) {
    if (!out.empty() && sorted(i) - sorted(out.back().back()) <= tol)
      out.back().push_back(i);
    else
      out.push_back({i});
  }
  return out;
}

} // namespace

const char *to_string(IsolatedStateKind kind) {
  return kind == IsolatedStateKind::bsec ? "BSEC" : "negative-energy IS";
}

std::vector<IsolatedStateRecord>
detect_isolated_states(const TruncatedHamiltonian &ham,
                       const DetectionTolerances &tol) {
  const int big_n = ham.rank_index();
  const double hw = ham.basis().hbar_omega();
  const auto &eps = ham.eigenvalues_hw();
  const auto &u = ham.eigenvectors();

  Eigen::VectorXd minor_eps;
  if (big_n > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> minor(
        ham.matrix_hw().topLeftCorner(big_n, big_n), Eigen::EigenvaluesOnly);
    if (minor.info() != Eigen::Success)
      throw NumericalError("detect_isolated_states: minor eigen-solve failed");
    minor_eps = minor.eigenvalues();
  }

  // Minor eigenvalues lying in a degenerate cluster of the minor itself.
  std::vector<bool> minor_degenerate(minor_eps.size(), false);
  for (const auto &c : clusters(minor_eps, tol.eigenvalue_hw))
    if (c.size() > 1)
      for (auto i : c)
        minor_degenerate[i] = true;

  std::vector<IsolatedStateRecord> out;
  for (const auto &cluster : clusters(eps, tol.eigenvalue_hw)) {
    double mean = 0.0;
    for (auto mu : cluster)
      mean += eps(mu);
    mean /= static_cast<double>(cluster.size());

    bool near_degenerate_minor = false;
    Eigen::Index nearest = -1;
    for (Eigen::Index nu = 0; nu < minor_eps.size(); ++nu)
      if (std::abs(minor_eps(nu) - mean) <= tol.eigenvalue_hw) {
        nearest = nu;
        near_degenerate_minor = near_degenerate_minor || minor_degenerate[nu];
      }

    if (cluster.size() > 1 || near_degenerate_minor) {
      IsolatedStateRecord rec;
      rec.energy_mev = mean * hw;
      rec.kind = mean > 0.0 ? IsolatedStateKind::bsec
                            : IsolatedStateKind::negative_energy;
      rec.degeneracy_guard = true;
      out.push_back(std::move(rec));
      continue;
    }

    const Eigen::Index mu = cluster.front();
    const bool common = nearest >= 0;
    const bool decoupled = std::abs(u(big_n, mu)) <= tol.last_component;
    if (common != decoupled) {
      std::ostringstream msg;
      msg << "detect_isolated_states: tests disagree at eigenvalue "
          << eps(mu) * hw << " MeV (common eigenvalue: "
          << (common ? "yes" : "no") << ", |U_N| = " << std::abs(u(big_n, mu))
          << "); tolerances miscalibrated";
      throw NumericalError(msg.str());
    }
    if (!common)
      continue;

    IsolatedStateRecord rec;
    rec.energy_mev = eps(mu) * hw;
    rec.coefficients = u.col(mu);
    rec.coefficients /= rec.coefficients.norm();
    rec.kind = eps(mu) > 0.0 ? IsolatedStateKind::bsec
                             : IsolatedStateKind::negative_energy;
    out.push_back(std::move(rec));
  }
  return out;
}

BlockStructureReport verify_block_structure(const TruncatedHamiltonian &ham,
                                            const IsolatedStateRecord &record,
                                            double tolerance_hw) {
  const int big_n = ham.rank_index();
  const double hw = ham.basis().hbar_omega();
  BlockStructureReport rep;
  if (record.coefficients.size() != big_n + 1)
    return rep;

  const Eigen::VectorXd &a = record.coefficients;
  const Eigen::VectorXd ha = ham.matrix_hw() * a;
  const double e = a.dot(ha);
  rep.energy_mev = e * hw;
  for (int j = 0; j <= big_n; ++j) {
    rep.couplings_mev.push_back(std::abs(ha(j) - e * a(j)) * hw);
    rep.max_residual_mev = std::max(rep.max_residual_mev, rep.couplings_mev.back());
  }
  rep.tail_coupling_mev =
      std::abs(a(big_n) * ham.basis().kinetic_hw(big_n, big_n + 1)) * hw;
  rep.max_residual_mev = std::max(rep.max_residual_mev, rep.tail_coupling_mev);
  rep.ok = rep.max_residual_mev <= tolerance_hw * hw;
  return rep;
}

ProjectorShift::ProjectorShift(Eigen::VectorXd target, double lambda_mev)
    : target_(std::move(target)), lambda_(lambda_mev) {
  if (target_.size() == 0)
    throw std::invalid_argument("ProjectorShift: empty target vector");
  if (std::abs(target_.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("ProjectorShift: target vector not normalized");
}

SeparablePotential apply_projector_shift(const SeparablePotential &potential,
                                         const ProjectorShift &shift) {
  const Eigen::Index dim = potential.rank_index() + 1;
  const auto &t = shift.target();
  for (Eigen::Index i = dim; i < t.size(); ++i)
    if (t(i) != 0.0)
      throw std::invalid_argument(
          "apply_projector_shift: target has support beyond index N");
  if (shift.lambda_mev() == 0.0)
    return potential;

  Eigen::VectorXd psi = Eigen::VectorXd::Zero(dim);
  psi.head(std::min(dim, t.size())) = t.head(std::min(dim, t.size()));
  Eigen::MatrixXd v = potential.v_mev();
  // Fill both triangles from one product so the result stays exactly symmetric.
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = i; j < dim; ++j) {
      v(i, j) += shift.lambda_mev() * psi(i) * psi(j);
      v(j, i) = v(i, j);
    }
  return {potential.basis(), v};
}

int levinson_count(std::span<const BoundStatePole> poles,
                   std::span<const IsolatedStateRecord> isolated) {
  const auto n_is = std::count_if(isolated.begin(), isolated.end(),
                                  [](const auto &r) { return !r.degeneracy_guard; });
  return static_cast<int>(poles.size() + n_is);
}

} // namespace jmis
