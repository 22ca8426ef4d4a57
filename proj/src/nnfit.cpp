#include <jmis/nnfit.hpp>

#include <jmis/errors.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace jmis {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

bool parse_double(const std::string &tok, double &out) {
  if (tok.empty())
    return false;
  char *end = nullptr;
  out = std::strtod(tok.c_str(), &end);
  return end == tok.c_str() + tok.size() && std::isfinite(out);
}

std::string format_g12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

} // namespace

const char *to_string(Channel channel) {
  return channel == Channel::singlet ? "singlet" : "triplet";
}

Channel parse_channel(const std::string &text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (t == "singlet" || t == "1s0")
    return Channel::singlet;
  if (t == "triplet" || t == "3s1")
    return Channel::triplet;
  throw ConfigError("unknown channel '" + text + "' (use singlet or triplet)");
}

PhaseShiftDataset load_dataset(std::istream &in, Channel channel,
                               const std::string &source) {
  PhaseShiftDataset ds;
  ds.channel = channel;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    std::istringstream ss(line);
    std::vector<std::string> tokens;
    for (std::string tok; ss >> tok;)
      tokens.push_back(tok);
    if (tokens.empty())
      continue;
    auto fail = [&](const std::string &why) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": " + why);
    };
    if (tokens.size() < 2 || tokens.size() > 3)
      fail("expected 'E_lab_MeV delta_deg [sigma_deg]'");
    PhaseShiftRow row;
    if (!parse_double(tokens[0], row.e_lab_mev))
      fail("bad energy '" + tokens[0] + "'");
    if (!parse_double(tokens[1], row.delta_deg))
      fail("bad phase shift '" + tokens[1] + "'");
    if (tokens.size() == 3) {
      double sigma = 0.0;
      if (!parse_double(tokens[2], sigma) || !(sigma > 0.0))
        fail("bad uncertainty '" + tokens[2] + "'");
      row.sigma_deg = sigma;
    }
    if (!(row.e_lab_mev > 0.0))
      fail("energy must be positive");
    if (!ds.rows.empty() && !(row.e_lab_mev > ds.rows.back().e_lab_mev))
      fail("energies must be strictly increasing");
    ds.rows.push_back(row);
  }
  if (ds.rows.size() < 3)
    throw ConfigError(source + ": dataset needs at least 3 rows, found " +
                      std::to_string(ds.rows.size()));
  return ds;
}

PhaseShiftDataset load_dataset(const std::filesystem::path &path,
                               Channel channel) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open dataset '" + path.string() + "'");
  return load_dataset(in, channel, path.string());
}

void write_dataset(std::ostream &out, const PhaseShiftDataset &dataset) {
  out << "# channel " << to_string(dataset.channel) << "\n";
  out << "# E_lab_MeV delta_deg [sigma_deg]\n";
  for (const auto &row : dataset.rows) {
    out << format_g12(row.e_lab_mev) << ' ' << format_g12(row.delta_deg);
    if (row.sigma_deg)
      out << ' ' << format_g12(*row.sigma_deg);
    out << '\n';
  }
}

SeparablePotential NNPotentialConfig::potential() const {
  const OscillatorBasis b = basis();
  const double t00 = kinetic_matrix_element(b, 0, 0);
  const double t01 = kinetic_matrix_element(b, 0, 1);
  Eigen::Matrix2d v;
  v << e_i_mev - t00, -t01, -t01, v11_hw * hbar_omega_mev;
  return {b, v};
}

namespace {

double model_deg(const TruncatedHamiltonian &ham, double e_lab_mev) {
  const double e_cm = 0.5 * e_lab_mev;
  try {
    return phase_shift(ham, e_cm) * kRadToDeg;
  } catch (const PoleProximityError &) {
    return phase_shift(ham, e_cm + 1e-8 * ham.basis().hbar_omega()) * kRadToDeg;
  }
}

} // namespace

double model_phase_shift_deg(const NNPotentialConfig &config, double e_lab_mev) {
  return model_deg(TruncatedHamiltonian(config.potential()), e_lab_mev);
}

std::vector<FitResidual> model_residuals(const PhaseShiftDataset &dataset,
                                         const NNPotentialConfig &config) {
  const TruncatedHamiltonian ham(config.potential());
  std::vector<double> e_cm;
  for (const auto &row : dataset.rows)
    e_cm.push_back(0.5 * row.e_lab_mev);
  const double hw = ham.basis().hbar_omega();
  auto principal = [&](double e) {
    try {
      return phase_shift(ham, e);
    } catch (const PoleProximityError &) {
      return phase_shift(ham, e + 1e-8 * hw);
    }
  };
  auto model = unwrap_phase_curve(principal, e_cm, BranchAnchor::highest);
  // Align the branch with the data at the highest energy.
  const double top = dataset.rows.back().delta_deg - model.back() * kRadToDeg;
  const double offset = 180.0 * std::round(top / 180.0);

  std::vector<FitResidual> out;
  for (std::size_t i = 0; i < dataset.rows.size(); ++i) {
    const auto &row = dataset.rows[i];
    FitResidual r;
    r.e_lab_mev = row.e_lab_mev;
    r.e_cm_mev = e_cm[i];
    r.delta_data_deg = row.delta_deg;
    r.delta_model_deg = model[i] * kRadToDeg + offset;
    r.residual_deg = r.delta_model_deg - r.delta_data_deg;
    r.weight = row.sigma_deg ? 1.0 / (*row.sigma_deg * *row.sigma_deg) : 1.0;
    out.push_back(r);
  }
  return out;
}

double fit_objective(const PhaseShiftDataset &dataset,
                     const NNPotentialConfig &config) {
  double sum = 0.0;
  for (const auto &r : model_residuals(dataset, config))
    sum += r.weight * r.residual_deg * r.residual_deg;
  return sum;
}

FitReport fit_v11(const PhaseShiftDataset &dataset,
                  const NNPotentialConfig &config_template,
                  const FitBounds &bounds) {
  if (!(bounds.lower_hw < bounds.upper_hw) || !(bounds.tolerance_hw > 0.0))
    throw std::invalid_argument("fit_v11: invalid bounds");
  FitReport rep;
  rep.config = config_template;
  rep.config.channel = dataset.channel;
  auto objective = [&](double v11) {
    NNPotentialConfig c = rep.config;
    c.v11_hw = v11;
    ++rep.evaluations;
    return fit_objective(dataset, c);
  };

  constexpr double kInvPhi = 0.6180339887498949;
  double a = bounds.lower_hw, b = bounds.upper_hw;
  double x1 = b - kInvPhi * (b - a), x2 = a + kInvPhi * (b - a);
  double f1 = objective(x1), f2 = objective(x2);
  while (b - a > bounds.tolerance_hw) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = objective(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = objective(x2);
    }
  }
  const double best = 0.5 * (a + b);
  if (best - bounds.lower_hw < 2.0 * bounds.tolerance_hw ||
      bounds.upper_hw - best < 2.0 * bounds.tolerance_hw) {
    std::ostringstream msg;
    msg << "fit_v11: minimum at the bound V11 = " << best
        << " hbar*omega; widen the bounds";
    throw NumericalError(msg.str());
  }
  rep.config.v11_hw = best;
  rep.residuals = model_residuals(dataset, rep.config);
  rep.objective = 0.0;
  for (const auto &r : rep.residuals)
    rep.objective += r.weight * r.residual_deg * r.residual_deg;
  return rep;
}

DeuteronReport deuteron_report(const NNPotentialConfig &config) {
  if (config.channel != Channel::triplet)
    throw std::invalid_argument("deuteron_report: requires the triplet channel");
  const TruncatedHamiltonian ham(config.potential());
  const auto params = Rank2Parameters::from_potential(ham.potential());
  auto poles = find_bound_poles(params);
  DeuteronReport rep;
  if (poles.empty())
    return rep;
  auto &pole = poles.front();
  pole.coefficients = bound_wavefunction(pole, ham);
  const auto rms = rms_radius(pole.coefficients, ham.basis());
  rep.bound = true;
  rep.energy_mev = pole.energy_mev;
  rep.kappa = pole.kappa;
  rep.pole_residual = pole.residual;
  rep.rms_relative_fm = rms.relative_fm;
  rep.rms_half_fm = rms.half_fm;
  rep.n_max = static_cast<int>(pole.coefficients.size()) - 1;
  rep.nodes = count_nodes(pole.coefficients, ham.basis(), 15.0, 1500);
  return rep;
}

} // namespace jmis
