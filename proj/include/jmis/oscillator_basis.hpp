#pragma once
#include <complex>
#include <vector>

namespace jmis {

//! hbar^2/mu in MeV fm^2 for the two-nucleon reduced mass mu = m_N/2.
inline constexpr double kNucleonMassConstant = 2.0 * 41.47105;

//! Harmonic-oscillator basis for one partial wave.
//!
//! Energies are in MeV, lengths in fm. Internally everything is evaluated in
//! oscillator units (energies in hbar*omega, lengths in r0).
class OscillatorBasis {
public:
  OscillatorBasis(double hbar_omega_mev, int l,
                  double mass_constant = kNucleonMassConstant);

  double hbar_omega() const { return hbar_omega_; }
  int l() const { return l_; }
  double mass_constant() const { return mass_constant_; }
  //! Oscillator length sqrt(mass_constant / hbar_omega).
  double r0() const { return r0_; }

  //! Kinetic matrix element in units of hbar*omega (tridiagonal).
  double kinetic_hw(int n, int np) const;

  bool operator==(const OscillatorBasis &) const = default;

private:
  double hbar_omega_;
  int l_;
  double mass_constant_;
  double r0_;
};

//! Momentum in oscillator units, p = sqrt(2E / hbar*omega).
//! Either real and non-negative (scattering) or purely imaginary with positive
//! imaginary part (bound states).
class Momentum {
public:
  static Momentum real(double p);
  static Momentum imaginary(double kappa);
  //! Real momentum for energy_hw >= 0, i*sqrt(2|E|) otherwise.
  static Momentum from_energy_hw(double energy_hw);

  std::complex<double> value() const { return value_; }
  bool is_real() const { return value_.imag() == 0.0; }
  //! p^2, which is real for both admissible kinds.
  double squared() const;
  //! Energy in units of hbar*omega.
  double energy_hw() const { return 0.5 * squared(); }

private:
  explicit Momentum(std::complex<double> v) : value_(v) {}
  std::complex<double> value_;
};

//! Radial oscillator function phi_nl(r) in fm^-1/2, including the (-1)^n
//! phase; normalized to unity over r in (0, inf).
double form_factor(const OscillatorBasis &basis, int n, double r_fm);

//! phi_0l(r) .. phi_{n_max}l(r) at one radius. Uses the three-term recurrence
//! in n with running rescaling, so it stays finite for large n and r.
std::vector<double> form_factor_table(const OscillatorBasis &basis, int n_max,
                                      double r_fm);

//! <n l|T|n' l> in MeV.
double kinetic_matrix_element(const OscillatorBasis &basis, int n, int np);

//! <n l|r^2|n' l> in fm^2.
double r2_matrix_element(const OscillatorBasis &basis, int n, int np);

//! Sine-like (regular) and cosine-like (irregular) J-matrix solutions
//! S_nl(p), C_nl(p) for n = 0..n_max.
//!
//! Values are held in scaled form, S_n = exp(-x/2) * s_scaled(n) and
//! C_n = exp(x/2) * c_scaled(n) with x = p^2, so that ratios stay finite at
//! energies where S underflows and C overflows.
class JSolutionTable {
public:
  JSolutionTable(const OscillatorBasis &basis, Momentum p, int n_max);

  int n_max() const { return static_cast<int>(s_.size()) - 1; }
  Momentum momentum() const { return p_; }
  //! x/2 = p^2/2; S_n = exp(-half_x) * s_scaled, C_n = exp(half_x) * c_scaled.
  double half_x() const { return 0.5 * p_.squared(); }

  std::complex<double> s_scaled(int n) const { return s_.at(n); }
  std::complex<double> c_scaled(int n) const { return c_.at(n); }

  std::complex<double> s(int n) const;
  std::complex<double> c(int n) const;
  //! C^(+-)_n = C_n +- i S_n.
  std::complex<double> c_pm(int n, int sign) const;

private:
  Momentum p_;
  std::vector<std::complex<double>> s_;
  std::vector<std::complex<double>> c_;
};

std::complex<double> s_solution(const OscillatorBasis &basis, int n, Momentum p);
std::complex<double> c_solution(const OscillatorBasis &basis, int n, Momentum p);
//! C_nl(p) + sign * i S_nl(p), sign = +1 or -1.
std::complex<double> c_plus_minus(const OscillatorBasis &basis, int n,
                                  Momentum p, int sign);

//! C^(+)_n for n = 0..n_max at imaginary momentum, where it is the decaying
//! (minimal) solution of the kinetic recurrence. Computed by backward ratio
//! recursion and normalized to the closed-form value at n = 0.
std::vector<std::complex<double>>
outgoing_solution_table(const OscillatorBasis &basis, Momentum p, int n_max);

} // namespace jmis
