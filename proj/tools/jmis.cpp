#include <jmis/commands.hpp>
#include <jmis/errors.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

std::vector<double> parse_list(const std::string &text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string tok; std::getline(ss, tok, ',');) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception &) {
      used = 0;
    }
    if (used == 0 || tok.find_first_not_of(" \t", used) != std::string::npos)
      throw jmis::ConfigError("bad number '" + tok + "' in list");
    out.push_back(v);
  }
  return out;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"J-matrix scattering for separable oscillator-basis potentials"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_path;
  app.add_option("--config", config_path, "flat key = value configuration")
      ->required();
  app.add_option("--out", out_path, "output path (stdout when omitted)");

  jmis::PhaseShiftArgs ps;
  auto *ps_cmd = app.add_subcommand("phase-shifts", "phase shifts and S-matrix CSV");
  ps_cmd->add_option("--emin", ps.e_min_lab_mev, "lowest E_lab, MeV");
  ps_cmd->add_option("--emax", ps.e_max_lab_mev, "highest E_lab, MeV");
  ps_cmd->add_option("--points", ps.points, "grid points");

  jmis::BetaScanArgs bs;
  std::string betas = "0.1,0.01,0.001,0.0001,0";
  std::optional<double> bs_emin, bs_emax;
  auto *bs_cmd = app.add_subcommand("beta-scan", "resonance tracks versus H01^2");
  bs_cmd->add_option("--betas", betas, "comma-separated beta list, hbar*omega^2");
  bs_cmd->add_option("--emin", bs_emin, "lowest E_cm, MeV");
  bs_cmd->add_option("--emax", bs_emax, "highest E_cm, MeV");
  bs_cmd->add_option("--points", bs.points, "log grid points");

  auto *poles_cmd = app.add_subcommand("poles", "bound-state poles and rms radii");
  auto *is_cmd = app.add_subcommand("isolated", "isolated-state detection");

  jmis::FitArgs fit;
  std::optional<std::string> residuals;
  std::string dataset;
  auto *fit_cmd = app.add_subcommand("fit", "fit V11 to a phase-shift dataset");
  fit_cmd->add_option("--dataset", dataset, "E_lab delta [sigma] table")->required();
  fit_cmd->add_option("--channel", fit.channel, "singlet or triplet");
  fit_cmd->add_option("--lower-hw", fit.lower_hw, "lower V11 bound, hbar*omega");
  fit_cmd->add_option("--upper-hw", fit.upper_hw, "upper V11 bound, hbar*omega");
  fit_cmd->add_option("--residuals", residuals, "residual CSV path");

  auto *verify_cmd = app.add_subcommand("verify", "invariant and oracle checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return jmis::kExitConfig;
  }

  std::optional<std::filesystem::path> out;
  if (out_path)
    out = *out_path;

  return jmis::run_guarded(
      [&] {
        const auto config = jmis::RunConfig::load(config_path);
        if (*ps_cmd) {
          ps.out = out;
          return jmis::cmd_phase_shifts(config, ps, std::cout, std::cerr);
        }
        if (*bs_cmd) {
          bs.betas_hw2 = parse_list(betas);
          bs.e_min_mev = bs_emin;
          bs.e_max_mev = bs_emax;
          bs.out = out;
          return jmis::cmd_beta_scan(config, bs, std::cout, std::cerr);
        }
        if (*poles_cmd)
          return jmis::cmd_poles(config, out, std::cout, std::cerr);
        if (*is_cmd)
          return jmis::cmd_isolated(config, out, std::cout, std::cerr);
        if (*fit_cmd) {
          fit.dataset = dataset;
          fit.out = out;
          if (residuals)
            fit.residuals = *residuals;
          return jmis::cmd_fit(config, fit, std::cout, std::cerr);
        }
        if (*verify_cmd)
          return jmis::cmd_verify(config, std::cout, std::cerr);
        return jmis::kExitConfig;
      },
      std::cerr);
}
