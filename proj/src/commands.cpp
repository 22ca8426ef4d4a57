#include <jmis/commands.hpp>

#include <jmis/errors.hpp>
#include <jmis/nnfit.hpp>
#include <jmis/oracle.hpp>
#include <jmis/poles.hpp>
#include <jmis/spectra.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

namespace jmis {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRadToDeg = 180.0 / kPi;

std::vector<double> linear_grid(double a, double b, int points) {
  if (points < 1)
    throw ConfigError("grid needs at least one point");
  if (points == 1)
    return {a};
  if (!(a < b))
    throw ConfigError("grid bounds must satisfy emin < emax");
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i)
    g[i] = a + (b - a) * i / (points - 1);
  return g;
}

std::vector<double> log_grid(double a, double b, int points) {
  if (!(a > 0.0) || !(a < b) || points < 2)
    throw ConfigError("log grid needs 0 < emin < emax and at least 2 points");
  std::vector<double> g(points);
  const double la = std::log(a), lb = std::log(b);
  for (int i = 0; i < points; ++i)
    g[i] = std::exp(la + (lb - la) * i / (points - 1));
  g.front() = a;
  g.back() = b;
  return g;
}

void print_warnings(const std::vector<std::string> &warnings, std::ostream &err) {
  for (const auto &w : warnings)
    err << "warning: " << w << "\n";
}

NNPotentialConfig nn_config(const RunConfig &config, Channel channel) {
  if (!config.flag_or("enforce_is", false))
    throw ConfigError(config.source() + ": fit requires enforce_is = true");
  if (config.rank_index() != 1)
    throw ConfigError(config.source() + ": fit requires rank = 2");
  if (config.integer_or("l", 0) != 0)
    throw ConfigError(config.source() + ": fit supports l = 0 only");
  NNPotentialConfig nn;
  nn.hbar_omega_mev = config.basis().hbar_omega();
  nn.mass_constant = config.basis().mass_constant();
  nn.e_i_mev = config.number("e_i_mev");
  nn.channel = channel;
  if (config.has("v_1_1_hw"))
    nn.v11_hw = config.number("v_1_1_hw");
  else if (config.has("v_1_1"))
    nn.v11_hw = config.number("v_1_1") / nn.hbar_omega_mev;
  return nn;
}

// Continuous phase-shift curve from the lowest energy reached by the
// Levinson check up to 10^3 hbar*omega.
struct LevinsonCheck {
  double delta_low = 0.0;
  double delta_high = 0.0;
  int n_bound = 0;
  int n_is = 0;
};

LevinsonCheck levinson_check(const TruncatedHamiltonian &ham,
                             std::vector<std::string> &warnings) {
  const double hw = ham.basis().hbar_omega();
  const auto grid = log_grid(1e-12 * hw, 1e3 * hw, 600);
  const auto sol = solve_scattering(ham, grid);
  warnings.insert(warnings.end(), sol.warnings.begin(), sol.warnings.end());
  const auto poles = find_bound_poles(ham, spectral_window(ham), &warnings);
  const auto is = detect_isolated_states(ham);
  LevinsonCheck out;
  out.delta_low = sol.phase_shifts.front();
  out.delta_high = sol.phase_shifts.back();
  out.n_bound = static_cast<int>(poles.size());
  out.n_is = levinson_count({}, is);
  return out;
}

} // namespace

int run_guarded(const std::function<int()> &body, std::ostream &err) {
  try {
    return body();
  } catch (const ConfigError &e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument &e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception &e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

OutputSink::OutputSink(const std::optional<std::filesystem::path> &path,
                       std::ostream &fallback)
    : stream_(&fallback) {
  if (path) {
    auto f = std::make_unique<std::ofstream>(*path);
    if (!*f)
      throw ConfigError("cannot open output '" + path->string() + "'");
    file_ = std::move(f);
    stream_ = file_.get();
  }
}

std::string csv_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

int cmd_phase_shifts(const RunConfig &config, const PhaseShiftArgs &args,
                     std::ostream &out, std::ostream &err) {
  const TruncatedHamiltonian ham(config.potential());
  const auto lab = linear_grid(args.e_min_lab_mev, args.e_max_lab_mev, args.points);
  std::vector<double> cm(lab.size());
  for (std::size_t i = 0; i < lab.size(); ++i) {
    if (!(lab[i] > 0.0))
      throw ConfigError("phase-shifts: energies must be positive");
    cm[i] = 0.5 * lab[i];
  }
  const auto sol = solve_scattering(ham, cm);
  print_warnings(sol.warnings, err);

  OutputSink sink(args.out, out);
  auto &os = sink.stream();
  os << "E_lab_MeV,E_cm_MeV,delta_deg,Re_S,Im_S\n";
  for (std::size_t i = 0; i < lab.size(); ++i)
    os << csv_number(lab[i]) << ',' << csv_number(cm[i]) << ','
       << csv_number(sol.phase_shifts[i] * kRadToDeg) << ','
       << csv_number(sol.s_matrix[i].real()) << ','
       << csv_number(sol.s_matrix[i].imag()) << '\n';
  return kExitOk;
}

int cmd_beta_scan(const RunConfig &config, const BetaScanArgs &args,
                  std::ostream &out, std::ostream &err) {
  const auto potential = config.potential();
  if (potential.rank_index() != 1)
    throw ConfigError("beta-scan: requires rank = 2");
  const auto base = Rank2Parameters::from_potential(potential);
  const double hw = base.basis.hbar_omega();
  const auto grid = log_grid(args.e_min_mev.value_or(1e-3 * hw),
                             args.e_max_mev.value_or(10.0 * hw), args.points);
  const auto scan = beta_scan(base, args.betas_hw2, grid);

  OutputSink sink(args.out, out);
  auto &os = sink.stream();
  os << "beta_hw2,E_r_MeV,Gamma_MeV\n";
  for (const auto &t : scan.tracks)
    os << csv_number(t.beta_hw2) << ',' << csv_number(t.energy_mev) << ','
       << csv_number(t.width_mev) << '\n';

  if (args.out) {
    const auto stem = args.out->parent_path() / args.out->stem();
    for (std::size_t i = 0; i < scan.curves.size(); ++i) {
      const std::filesystem::path path =
          stem.string() + "_beta_" + std::to_string(i) + ".csv";
      std::ofstream f(path);
      if (!f)
        throw ConfigError("cannot open output '" + path.string() + "'");
      f << "E_MeV,delta_deg\n";
      const auto &c = scan.curves[i];
      for (std::size_t k = 0; k < c.energies_mev.size(); ++k)
        f << csv_number(c.energies_mev[k]) << ','
          << csv_number(c.phase_shifts[k] * kRadToDeg) << '\n';
      err << "beta = " << csv_number(c.beta_hw2) << ": curve written to "
          << path.string() << "\n";
    }
  }
  return kExitOk;
}

int cmd_poles(const RunConfig &config,
              const std::optional<std::filesystem::path> &out_path,
              std::ostream &out, std::ostream &err) {
  const TruncatedHamiltonian ham(config.potential());
  std::vector<std::string> warnings;
  auto poles = find_bound_poles(ham, spectral_window(ham), &warnings);
  attach_wavefunctions(poles, ham, &warnings);
  print_warnings(warnings, err);

  if (poles.empty())
    out << "no bound states\n";
  for (const auto &p : poles)
    out << "bound state: E = " << csv_number(p.energy_mev)
        << " MeV, kappa = " << csv_number(p.kappa)
        << ", rms_relative = " << csv_number(p.rms_relative_fm)
        << " fm, rms_half = " << csv_number(p.rms_half_fm)
        << " fm, n_max = " << p.coefficients.size() - 1 << "\n";

  if (out_path) {
    OutputSink sink(out_path, out);
    auto &os = sink.stream();
    os << "E_MeV,kappa,residual,rms_relative_fm,rms_half_fm,n_max\n";
    for (const auto &p : poles)
      os << csv_number(p.energy_mev) << ',' << csv_number(p.kappa) << ','
         << csv_number(p.residual) << ',' << csv_number(p.rms_relative_fm)
         << ',' << csv_number(p.rms_half_fm) << ','
         << p.coefficients.size() - 1 << '\n';
  }
  return kExitOk;
}

int cmd_isolated(const RunConfig &config,
                 const std::optional<std::filesystem::path> &out_path,
                 std::ostream &out, std::ostream &) {
  const TruncatedHamiltonian ham(config.potential());
  const auto records = detect_isolated_states(ham);
  if (records.empty())
    out << "no isolated states\n";
  for (const auto &r : records) {
    if (r.degeneracy_guard) {
      out << "degenerate cluster near " << csv_number(r.energy_mev)
          << " MeV: detection skipped\n";
      continue;
    }
    out << "isolated state: E = " << csv_number(r.energy_mev) << " MeV ("
        << to_string(r.kind) << ")\n";
  }
  if (out_path) {
    OutputSink sink(out_path, out);
    auto &os = sink.stream();
    os << "E_MeV,kind,degeneracy_guard";
    for (int n = 0; n <= ham.rank_index(); ++n)
      os << ",alpha_" << n;
    os << '\n';
    for (const auto &r : records) {
      os << csv_number(r.energy_mev) << ',' << to_string(r.kind) << ','
         << (r.degeneracy_guard ? 1 : 0);
      for (int n = 0; n <= ham.rank_index(); ++n)
        os << ',' << (r.degeneracy_guard ? "" : csv_number(r.coefficients(n)));
      os << '\n';
    }
  }
  return kExitOk;
}

int cmd_fit(const RunConfig &config, const FitArgs &args, std::ostream &out,
            std::ostream &err) {
  if (!args.channel && !config.has("channel"))
    throw ConfigError("fit: give --channel or a channel key in " + config.source());
  const Channel channel = parse_channel(args.channel ? *args.channel : config.get("channel"));
  const auto dataset = load_dataset(args.dataset, channel);
  const auto tmpl = nn_config(config, channel);
  FitBounds bounds;
  bounds.lower_hw = args.lower_hw;
  bounds.upper_hw = args.upper_hw;
  const auto rep = fit_v11(dataset, tmpl, bounds);

  out << "fitted V11 = " << csv_number(rep.config.v11_hw)
      << " hbar*omega, objective = " << csv_number(rep.objective)
      << " deg^2, evaluations = " << rep.evaluations << "\n";

  RunConfig fitted = config;
  fitted.erase("v_1_1");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", rep.config.v11_hw);
  fitted.set("v_1_1_hw", buf);
  fitted.set("channel", to_string(channel));
  if (args.out) {
    std::ofstream f(*args.out);
    if (!f)
      throw ConfigError("cannot open output '" + args.out->string() + "'");
    f << "# fitted to " << args.dataset.string() << "\n";
    fitted.write(f);
    err << "fitted config written to " << args.out->string() << "\n";
  }

  if (args.residuals) {
    OutputSink sink(args.residuals, out);
    auto &os = sink.stream();
    os << "E_lab_MeV,E_cm_MeV,delta_data_deg,delta_model_deg,residual_deg,weight\n";
    for (const auto &r : rep.residuals)
      os << csv_number(r.e_lab_mev) << ',' << csv_number(r.e_cm_mev) << ','
         << csv_number(r.delta_data_deg) << ',' << csv_number(r.delta_model_deg)
         << ',' << csv_number(r.residual_deg) << ',' << csv_number(r.weight)
         << '\n';
  }
  return kExitOk;
}

int cmd_verify(const RunConfig &config, std::ostream &out, std::ostream &err) {
  bool all_ok = true;
  auto report = [&](const std::string &name, bool ok, const std::string &detail) {
    out << (ok ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
    all_ok = all_ok && ok;
  };

  if (auto bad = config.symmetry_violation()) {
    report("symmetry", false, "strength matrix not symmetric, " + *bad);
    return kExitVerify;
  }
  report("symmetry", true, "strength matrix symmetric");

  const TruncatedHamiltonian ham(config.potential());
  std::ostringstream msg;

  {
    const auto &h = ham.matrix_hw();
    const auto &u = ham.eigenvectors();
    const double res =
        (h * u - u * ham.eigenvalues_hw().asDiagonal()).norm() / std::max(h.norm(), 1e-300);
    const double orth =
        (u.transpose() * u - Eigen::MatrixXd::Identity(u.cols(), u.cols())).norm();
    msg.str("");
    msg << "residual " << res << ", orthogonality " << orth;
    report("eigen-decomposition", res <= 1e-10 && orth <= 1e-12, msg.str());
  }

  const auto lab = linear_grid(1.0, 300.0, 50);
  {
    double worst_mod = 0.0, worst_exp = 0.0;
    std::vector<double> cm;
    for (double e : lab)
      cm.push_back(0.5 * e);
    const auto sol = solve_scattering(ham, cm);
    for (std::size_t i = 0; i < cm.size(); ++i) {
      const auto s = sol.s_matrix[i];
      worst_mod = std::max(worst_mod, std::abs(std::abs(s) - 1.0));
      worst_exp = std::max(
          worst_exp, std::abs(s - std::polar(1.0, 2.0 * sol.phase_shifts[i])));
    }
    msg.str("");
    msg << "max ||S|-1| = " << worst_mod << ", max |S - exp(2i delta)| = " << worst_exp;
    report("unitarity", worst_mod <= 1e-10 && worst_exp <= 1e-10, msg.str());
  }

  {
    double worst = 0.0;
    for (double e : linear_grid(1.0, 300.0, 20)) {
      const double ej = phase_shift(ham, 0.5 * e);
      const double eo = solve_tmatrix(ham.potential(), 0.5 * e);
      double d = std::fmod(std::abs(ej - eo), kPi);
      worst = std::max(worst, std::min(d, kPi - d));
    }
    msg.str("");
    msg << "max |delta_J - delta_LS| = " << worst << " rad on 20 energies";
    report("oracle", worst <= 1e-6, msg.str());
  }

  {
    bool ok = true;
    std::ostringstream detail;
    try {
      const auto records = detect_isolated_states(ham);
      detail << records.size() << " isolated state(s)";
      for (const auto &r : records) {
        if (r.degeneracy_guard) {
          ok = false;
          detail << "; degenerate cluster near " << r.energy_mev << " MeV";
          continue;
        }
        const auto block = verify_block_structure(ham, r);
        ok = ok && block.ok;
        detail << "; E = " << r.energy_mev << " MeV, block residual "
               << block.max_residual_mev << " MeV";
      }
    } catch (const NumericalError &e) {
      ok = false;
      detail << e.what();
    }
    report("isolated-states", ok, detail.str());
  }

  {
    std::vector<std::string> warnings;
    const auto lev = levinson_check(ham, warnings);
    print_warnings(warnings, err);
    const double lhs = lev.delta_low - lev.delta_high;
    const double rhs = kPi * (lev.n_bound + lev.n_is);
    msg.str("");
    msg << "delta(0+) - delta(1e3 hw) = " << lhs << ", pi*(" << lev.n_bound
        << " bound + " << lev.n_is << " IS) = " << rhs;
    report("levinson", std::abs(lhs - rhs) <= 1e-3, msg.str());
  }

  return all_ok ? kExitOk : kExitVerify;
}

} // namespace jmis
