#pragma once

#include <vector>

#include "phaseshift/potential.hpp"

// Fixed-energy phase shifts of a piecewise-constant potential by matching
// the free-wave solutions A j_l(kappa r) + B n_l(kappa r) across each layer
// interface.
//
// `coupling` multiplies the potential inside the radial equation:
//   phi'' + (k^2 - coupling * q(r) - l(l+1)/r^2) phi = 0.
// The default of 1 is the plain Schroedinger form. inverse_energy_coupling(k)
// (= 1/k^2) reproduces tabulations in which q is measured in units of the
// energy.

namespace phaseshift {

inline constexpr double kKappaMinFactor = 1e-6;
// Coefficient pairs are renormalized when they leave [1/kRescaleBound, kRescaleBound].
inline constexpr double kRescaleBound = 1e100;

inline double inverse_energy_coupling(double k) { return 1.0 / (k * k); }

struct LayerWavenumbers {
  // kappa[i] for layer i (0-based); the final entry is the exterior value k.
  std::vector<double> kappa;
};

struct Matrix2 {
  double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;
  double determinant() const { return a11 * a22 - a12 * a21; }
};

// Coefficients of phi_l = A j_l(kappa r) + B n_l(kappa r) on one layer.
// The true coefficients are (a, b) * 2^scale_exponent.
struct InteriorState {
  double a = 1.0;
  double b = 0.0;
  int scale_exponent = 0;

  double ratio() const { return b / a; }
};

struct PhaseShiftTable {
  double k = 0.0;
  int l_max = 0;
  std::vector<double> delta;  // delta[l], l = 0..l_max
};

// Throws DomainError for k <= 0 and EvanescentLayer (1-based) when
// k^2 - coupling*q_i <= (kKappaMinFactor*k)^2.
LayerWavenumbers compute_wavenumbers(const Potential& p, double k, double coupling = 1.0);

// alpha^i for the interface at r_i between wavenumbers kappa_i and kappa_next;
// (A, B)_{next} = alpha (A, B)_i / kappa_next, det(alpha) = kappa_i kappa_next.
Matrix2 interface_matrix(int l, double kappa_i, double kappa_next, double r_i);

// Exterior coefficients (A_{N+1}, B_{N+1}) up to a positive scale, starting
// from the regular solution (1, 0) in the innermost layer.
InteriorState propagate(const Potential& p, double k, int l, double coupling = 1.0);

// Same for every l = 0..l_max, sharing the Bessel evaluations.
std::vector<InteriorState> propagate_all(const Potential& p, double k, int l_max,
                                         double coupling = 1.0);

// delta = -atan(B/A) on the principal branch; +-pi/2 with sign -sign(B) when A == 0.
double phase_shift_from_state(const InteriorState& s);

double phase_shift(const Potential& p, double k, int l, double coupling = 1.0);

PhaseShiftTable phase_shift_table(const Potential& p, double k, int l_max,
                                  double coupling = 1.0);

}  // namespace phaseshift
