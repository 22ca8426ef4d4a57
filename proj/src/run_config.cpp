#include <jmis/run_config.hpp>

#include <jmis/errors.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

namespace jmis {

namespace {

const std::set<std::string> kKnownKeys = {
    "hbar_omega_mev", "mass_constant", "l",       "rank",
    "enforce_is",     "e_i_mev",       "channel", "e_min_mev",
    "e_max_mev",      "points",        "betas_hw2"};

const std::regex kStrengthKey(R"(v_(\d+)_(\d+)(_hw)?)");

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string strength_key(int n, int m) {
  return "v_" + std::to_string(n) + "_" + std::to_string(m);
}

} // namespace

RunConfig RunConfig::parse(std::istream &in, const std::string &source) {
  RunConfig cfg;
  cfg.source_ = source;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(line_no);
    if (eq == std::string::npos)
      throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError(where + ": empty key or value");
    if (!kKnownKeys.count(key) && !std::regex_match(key, kStrengthKey))
      throw ConfigError(where + ": unknown config key '" + key + "'");
    if (cfg.entries_.count(key))
      throw ConfigError(where + ": duplicate config key '" + key + "'");
    cfg.entries_[key] = value;
  }
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config '" + path.string() + "'");
  return parse(in, path.string());
}

const std::string &RunConfig::get(const std::string &key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end())
    throw ConfigError(source_ + ": missing config key '" + key + "'");
  return it->second;
}

double RunConfig::number(const std::string &key) const {
  const std::string &v = get(key);
  char *end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end != v.c_str() + v.size() || !std::isfinite(x))
    throw ConfigError(source_ + ": key '" + key + "' is not a number: '" + v + "'");
  return x;
}

double RunConfig::number_or(const std::string &key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

int RunConfig::integer(const std::string &key) const {
  const double x = number(key);
  if (x != std::floor(x) || std::abs(x) > 1e9)
    throw ConfigError(source_ + ": key '" + key + "' must be an integer");
  return static_cast<int>(x);
}

int RunConfig::integer_or(const std::string &key, int fallback) const {
  return has(key) ? integer(key) : fallback;
}

bool RunConfig::flag_or(const std::string &key, bool fallback) const {
  if (!has(key))
    return fallback;
  std::string v = get(key);
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (v == "true" || v == "yes" || v == "1")
    return true;
  if (v == "false" || v == "no" || v == "0")
    return false;
  throw ConfigError(source_ + ": key '" + key + "' must be true or false");
}

void RunConfig::set(const std::string &key, const std::string &value) {
  entries_[key] = value;
}

OscillatorBasis RunConfig::basis() const {
  const double hw = number("hbar_omega_mev");
  const double mc = number_or("mass_constant", kNucleonMassConstant);
  const int l = integer_or("l", 0);
  if (!(hw > 0.0))
    throw ConfigError(source_ + ": hbar_omega_mev must be positive");
  if (!(mc > 0.0))
    throw ConfigError(source_ + ": mass_constant must be positive");
  if (l < 0)
    throw ConfigError(source_ + ": l must be non-negative");
  return {hw, l, mc};
}

int RunConfig::rank_index() const {
  const int rank = integer("rank");
  if (rank < 1)
    throw ConfigError(source_ + ": rank must be at least 1");
  return rank - 1;
}

Eigen::MatrixXd RunConfig::v_matrix_mev() const {
  const OscillatorBasis b = basis();
  const int big_n = rank_index();
  const int dim = big_n + 1;

  // Entry (n, m) as written, in MeV, or nullopt when absent.
  auto entry = [&](int n, int m) -> std::optional<double> {
    const std::string k = strength_key(n, m);
    const bool mev = has(k), hw = has(k + "_hw");
    if (mev && hw)
      throw ConfigError(source_ + ": both '" + k + "' and '" + k + "_hw' given");
    if (mev)
      return number(k);
    if (hw)
      return number(k + "_hw") * b.hbar_omega();
    return std::nullopt;
  };

  for (const auto &[key, value] : entries_) {
    std::smatch m;
    if (std::regex_match(key, m, kStrengthKey) &&
        (std::stoi(m[1]) > big_n || std::stoi(m[2]) > big_n))
      throw ConfigError(source_ + ": key '" + key + "' exceeds the declared rank");
  }

  const bool enforce = flag_or("enforce_is", false);
  if (enforce && dim < 2)
    throw ConfigError(source_ + ": enforce_is requires rank >= 2");

  Eigen::MatrixXd v(dim, dim);
  for (int n = 0; n < dim; ++n)
    for (int m = n; m < dim; ++m) {
      if (enforce && n == 0) {
        for (auto [i, j] : {std::pair{0, m}, std::pair{m, 0}})
          if (auto x = entry(i, j); x && (m < 2 || *x != 0.0))
            throw ConfigError(source_ + ": '" + strength_key(i, j) +
                              "' conflicts with enforce_is");
        const double t00 = kinetic_matrix_element(b, 0, 0);
        const double t01 = kinetic_matrix_element(b, 0, 1);
        const double val =
            m == 0 ? number("e_i_mev") - t00 : (m == 1 ? -t01 : 0.0);
        v(0, m) = v(m, 0) = val;
        continue;
      }
      const auto upper = entry(n, m);
      const auto lower = n == m ? upper : entry(m, n);
      if (!upper && !lower)
        throw ConfigError(source_ + ": missing config key '" + strength_key(n, m) +
                          "'");
      v(n, m) = upper ? *upper : *lower;
      v(m, n) = lower ? *lower : *upper;
    }
  return v;
}

std::optional<std::string> RunConfig::symmetry_violation() const {
  const Eigen::MatrixXd v = v_matrix_mev();
  for (Eigen::Index i = 0; i < v.rows(); ++i)
    for (Eigen::Index j = i + 1; j < v.cols(); ++j)
      if (v(i, j) != v(j, i)) {
        std::ostringstream msg;
        msg << strength_key(int(i), int(j)) << " = " << v(i, j)
            << " != " << strength_key(int(j), int(i)) << " = " << v(j, i);
        return msg.str();
      }
  return std::nullopt;
}

SeparablePotential RunConfig::potential() const {
  if (auto bad = symmetry_violation())
    throw ConfigError(source_ + ": strength matrix not symmetric: " + *bad);
  return {basis(), v_matrix_mev()};
}

void RunConfig::write(std::ostream &out) const {
  for (const auto &[key, value] : entries_)
    out << key << " = " << value << "\n";
}

} // namespace jmis
