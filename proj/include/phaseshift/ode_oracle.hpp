#pragma once

#include "phaseshift/potential.hpp"

// Reference phase shifts by direct integration of the radial equation
//   phi'' + (k^2 - coupling*q(r) - l(l+1)/r^2) phi = 0
// with classical RK4. Slow, but shares no code with the interface-matching
// solver except the free-wave functions used to read off the phase at the
// support radius. Layers above the energy are fine here.

namespace phaseshift {

struct OdeSettings {
  double r_start_factor = 1e-4;  // start radius as a fraction of the support radius
  int step_count = 20000;        // total RK4 steps from the start radius to R
  // Multiplies the initial condition; the result must not depend on it.
  double initial_scale = 1.0;

  void validate() const;
};

// Integrates from r_start = r_start_factor * R with the regular series start
// phi ~ r^{l+1}/(2l+1)!!. Steps are uniform in ln r within each layer and
// the layer interfaces are always step boundaries; layers receive steps in
// proportion to their (l+1) ln(r_i/r_{i-1}) + |kappa_i| (r_i - r_{i-1}).
double phase_shift_ode(const Potential& p, double k, int l, const OdeSettings& s = {},
                       double coupling = 1.0);

}  // namespace phaseshift
