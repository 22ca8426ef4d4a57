#pragma once
#include <jmis/run_config.hpp>

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace jmis {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitVerify = 4;

//! Runs a command body, mapping exceptions to exit codes and printing the
//! message to err: ConfigError and std::invalid_argument give 2, anything
//! else 3.
int run_guarded(const std::function<int()> &body, std::ostream &err);

//! Writes to the file when a path is given, otherwise to the fallback stream.
class OutputSink {
public:
  OutputSink(const std::optional<std::filesystem::path> &path,
             std::ostream &fallback);
  std::ostream &stream() { return *stream_; }

private:
  std::unique_ptr<std::ostream> file_;
  std::ostream *stream_;
};

//! printf("%.12g").
std::string csv_number(double v);

struct PhaseShiftArgs {
  //! Laboratory energies, MeV; E_cm = E_lab / 2.
  double e_min_lab_mev = 1.0;
  double e_max_lab_mev = 300.0;
  int points = 300;
  std::optional<std::filesystem::path> out;
};

//! CSV E_lab_MeV,E_cm_MeV,delta_deg,Re_S,Im_S on a uniform grid.
int cmd_phase_shifts(const RunConfig &config, const PhaseShiftArgs &args,
                     std::ostream &out, std::ostream &err);

struct BetaScanArgs {
  //! beta values in hbar*omega^2 units.
  std::vector<double> betas_hw2 = {1e-1, 1e-2, 1e-3, 1e-4, 0.0};
  //! CM energies, MeV; logarithmic grid. Defaults: 1e-3 and 10 hbar*omega.
  std::optional<double> e_min_mev;
  std::optional<double> e_max_mev;
  int points = 400;
  //! Track CSV. Curves go to <stem>_beta_<i>.csv next to it.
  std::optional<std::filesystem::path> out;
};

//! Track CSV beta_hw2,E_r_MeV,Gamma_MeV and, with --out, one curve CSV
//! E_MeV,delta_deg per beta.
int cmd_beta_scan(const RunConfig &config, const BetaScanArgs &args,
                  std::ostream &out, std::ostream &err);

//! Bound-state report; CSV E_MeV,kappa,residual,rms_relative_fm,rms_half_fm,
//! n_max to the output path when given.
int cmd_poles(const RunConfig &config,
              const std::optional<std::filesystem::path> &out_path,
              std::ostream &out, std::ostream &err);

//! Isolated-state report; CSV E_MeV,kind,degeneracy_guard,alpha_0..alpha_N.
int cmd_isolated(const RunConfig &config,
                 const std::optional<std::filesystem::path> &out_path,
                 std::ostream &out, std::ostream &err);

struct FitArgs {
  std::filesystem::path dataset;
  //! Falls back to the config's channel key.
  std::optional<std::string> channel;
  double lower_hw = -1.5;
  double upper_hw = -0.2;
  //! Fitted configuration.
  std::optional<std::filesystem::path> out;
  //! Residual CSV.
  std::optional<std::filesystem::path> residuals;
};

//! Fits v_1_1 of an enforce_is rank-2 config to a dataset.
int cmd_fit(const RunConfig &config, const FitArgs &args, std::ostream &out,
            std::ostream &err);

//! Symmetry, eigen-decomposition, unitarity, oracle, isolated-state and
//! Levinson checks; one PASS/FAIL line each; exit 4 on any failure.
int cmd_verify(const RunConfig &config, std::ostream &out, std::ostream &err);

} // namespace jmis
