#pragma once

#include <stdexcept>

namespace cbf {

/// Physical constants of the damped Navier-Stokes system.
///
/// A plain aggregate so tests can build degenerate parameter sets (mu = 0,
/// beta = 0, convection switched off). Production code goes through make().
struct FluidParams {
  double mu = 1.0;     ///< effective viscosity
  double alpha = 0.0;  ///< Darcy coefficient
  double beta = 1.0;   ///< Forchheimer coefficient
  double r = 3.0;      ///< absorption exponent
  bool convection = true;

  static FluidParams make(double mu, double alpha, double beta, double r) {
    FluidParams p{mu, alpha, beta, r, true};
    p.validate();
    return p;
  }

  void validate() const {
    if (!(mu > 0.0)) throw std::invalid_argument("params: mu must be positive");
    if (!(alpha >= 0.0)) throw std::invalid_argument("params: alpha must be non-negative");
    if (!(beta > 0.0)) throw std::invalid_argument("params: beta must be positive");
    if (!(r >= 1.0)) throw std::invalid_argument("params: r must be >= 1");
  }

  /// Recorded for r = 3, where monotonicity without a shift needs 2 beta mu >= 1.
  bool critical_ok() const { return r == 3.0 && 2.0 * beta * mu >= 1.0; }
};

}  // namespace cbf
