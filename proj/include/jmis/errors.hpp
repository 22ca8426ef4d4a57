#pragma once
#include <stdexcept>
#include <string>

namespace jmis {

//! Invalid user input: malformed configuration, missing keys, bad arguments.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

//! A numerical procedure failed to converge or hit a singular configuration.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

//! Energy too close to an eigenvalue of the truncated Hamiltonian; the caller
//! should offset the evaluation point.
class PoleProximityError : public NumericalError {
public:
  PoleProximityError(const std::string &what, double eigenvalue_mev)
      : NumericalError(what), eigenvalue(eigenvalue_mev) {}
  double eigenvalue;
};

} // namespace jmis
