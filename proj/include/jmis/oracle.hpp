#pragma once
#include <jmis/jmatrix.hpp>

#include <string>
#include <vector>

namespace jmis {

//! Quadrature on k in (0, k_max) for the principal-value Green's function,
//! split at the on-shell momentum k0. Any momentum unit; the solver uses 1/r0.
struct MomentumGrid {
  std::vector<double> nodes;
  std::vector<double> weights;
  double k0 = 0.0;
  double k_max = 0.0;
  std::string scheme = "pole-subtraction";
};

//! Gauss-Legendre panels between 0, k0, 2 k0 and a few fixed points up to
//! k_max; nodes_per_panel >= 16 keeps the total at or above 64.
MomentumGrid make_momentum_grid(double k0_fm, double k_max_fm,
                                int nodes_per_panel);

//! Momentum-space oscillator function in fm^1/2, normalized over k. Built from
//! the Laguerre closed form, with the phase chosen so that its radial Fourier
//! transform sqrt(2/pi) int phi_n(r) k r j_l(kr) dr reproduces it up to i^l.
double momentum_form_factor(const OscillatorBasis &basis, int n, double k_fm);

struct OracleOptions {
  //! k_max in units of 1/r0.
  double k_max_r0 = 40.0;
  int initial_nodes = 32;
  int max_nodes = 4096;
  //! Refinement stops when delta changes by less than this (radians).
  double tolerance = 1e-8;
};

//! On-shell phase shift (principal branch) from the separable K-matrix
//! kappa = (1 - V G)^-1 V, with G the principal-value Green's function
//! projected on the form factors. Node counts double until converged.
double solve_tmatrix(const SeparablePotential &potential, double energy_mev,
                     const OracleOptions &options = {});

} // namespace jmis
