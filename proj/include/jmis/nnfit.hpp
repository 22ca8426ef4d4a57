#pragma once
#include <jmis/oscillator_basis.hpp>
#include <jmis/poles.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace jmis {

enum class Channel { singlet, triplet };

const char *to_string(Channel channel);
//! Accepts "singlet", "1s0", "triplet", "3s1" (case-insensitive).
Channel parse_channel(const std::string &text);

struct PhaseShiftRow {
  double e_lab_mev = 0.0;
  double delta_deg = 0.0;
  std::optional<double> sigma_deg;

  bool operator==(const PhaseShiftRow &) const = default;
};

struct PhaseShiftDataset {
  Channel channel = Channel::singlet;
  std::vector<PhaseShiftRow> rows;

  bool operator==(const PhaseShiftDataset &) const = default;
};

//! Whitespace-separated "E_lab_MeV delta_deg [sigma_deg]" rows; '#' starts a
//! comment, blank lines are skipped. Throws ConfigError with the line number
//! on malformed rows, and on fewer than 3 rows or non-increasing energies.
PhaseShiftDataset load_dataset(std::istream &in, Channel channel,
                               const std::string &source = "<stream>");
PhaseShiftDataset load_dataset(const std::filesystem::path &path, Channel channel);
void write_dataset(std::ostream &out, const PhaseShiftDataset &dataset);

//! Rank-2 NN potential with an isolated state: V00 = E_I - T00,
//! V01 = V10 = -T01, V11 free.
struct NNPotentialConfig {
  double hbar_omega_mev = 500.0;
  double v11_hw = 0.0;
  double e_i_mev = 0.0;
  Channel channel = Channel::singlet;
  double mass_constant = kNucleonMassConstant;

  OscillatorBasis basis() const { return {hbar_omega_mev, 0, mass_constant}; }
  SeparablePotential potential() const;
};

//! Model phase shift in degrees (principal branch) at a laboratory energy,
//! E_cm = E_lab / 2.
double model_phase_shift_deg(const NNPotentialConfig &config, double e_lab_mev);

struct FitBounds {
  double lower_hw = -1.5;
  double upper_hw = -0.2;
  double tolerance_hw = 1e-6;
};

struct FitResidual {
  double e_lab_mev = 0.0;
  double e_cm_mev = 0.0;
  double delta_data_deg = 0.0;
  //! Model on a continuous branch along the dataset energies, shifted by the
  //! multiple of 180 degrees that best matches the data at the highest
  //! energy. Data with any Levinson offset thus need no branch bookkeeping.
  double delta_model_deg = 0.0;
  //! model - data.
  double residual_deg = 0.0;
  double weight = 1.0;
};

std::vector<FitResidual> model_residuals(const PhaseShiftDataset &dataset,
                                         const NNPotentialConfig &config);
//! sum weight * residual^2 (degrees squared).
double fit_objective(const PhaseShiftDataset &dataset,
                     const NNPotentialConfig &config);

struct FitReport {
  NNPotentialConfig config;
  double objective = 0.0;
  std::vector<FitResidual> residuals;
  int evaluations = 0;
};

//! Golden-section search over V11 (hbar*omega units) inside the bounds.
//! Throws NumericalError when the minimum sits on a bound.
FitReport fit_v11(const PhaseShiftDataset &dataset,
                  const NNPotentialConfig &config_template,
                  const FitBounds &bounds = {});

struct DeuteronReport {
  bool bound = false;
  double energy_mev = 0.0;
  double kappa = 0.0;
  double pole_residual = 0.0;
  double rms_relative_fm = 0.0;
  double rms_half_fm = 0.0;
  int n_max = 0;
  int nodes = 0;
  //! Published values for this model and experiment, for side-by-side output.
  double reference_energy_mev = -2.22496;
  double reference_rms_fm = 1.87;
  double experimental_energy_mev = -2.224575;
  double experimental_rms_fm = 1.9676;
};

//! Bound pole, wavefunction, rms radius and node count for a triplet config.
DeuteronReport deuteron_report(const NNPotentialConfig &config);

} // namespace jmis
