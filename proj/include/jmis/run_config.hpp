#pragma once
#include <jmis/jmatrix.hpp>

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

namespace jmis {

//! Flat "key = value" configuration with '#' comments.
//!
//! Potential keys: rank (= N + 1) and v_<n>_<m> in MeV or v_<n>_<m>_hw in
//! units of hbar*omega. Giving only one of v_n_m / v_m_n mirrors it. With
//! enforce_is = true, v_0_0 and v_0_m are derived from e_i_mev and must not
//! be given. Unknown keys are rejected.
class RunConfig {
public:
  static RunConfig parse(std::istream &in, const std::string &source = "<config>");
  static RunConfig load(const std::filesystem::path &path);

  bool has(const std::string &key) const { return entries_.count(key) != 0; }
  //! Throws ConfigError naming the key when absent.
  const std::string &get(const std::string &key) const;
  double number(const std::string &key) const;
  double number_or(const std::string &key, double fallback) const;
  int integer(const std::string &key) const;
  int integer_or(const std::string &key, int fallback) const;
  bool flag_or(const std::string &key, bool fallback) const;

  void set(const std::string &key, const std::string &value);
  void erase(const std::string &key) { entries_.erase(key); }
  const std::map<std::string, std::string> &entries() const { return entries_; }
  const std::string &source() const { return source_; }

  OscillatorBasis basis() const;
  //! rank - 1.
  int rank_index() const;
  //! Strength matrix in MeV as written, which may be asymmetric.
  Eigen::MatrixXd v_matrix_mev() const;
  //! First asymmetric pair as "v_i_j != v_j_i", if any.
  std::optional<std::string> symmetry_violation() const;
  //! Throws ConfigError on an asymmetric matrix.
  SeparablePotential potential() const;

  //! One "key = value" line per entry, sorted by key.
  void write(std::ostream &out) const;

private:
  std::map<std::string, std::string> entries_;
  std::string source_;
};

} // namespace jmis
