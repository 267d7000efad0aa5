#pragma once

#include <vector>

// Riccati-Bessel functions j_l(x) = x * (spherical j_l)(x) and
// n_l(x) = x * (spherical y_l)(x). With this normalization
//   j_0 = sin x,  n_0 = -cos x,  j_l n_l' - j_l' n_l = 1,
//   j_l(x) ~ sin(x - l pi/2),  n_l(x) ~ -cos(x - l pi/2)  as x -> inf.
// Nothing outside this module depends on how the values are obtained; a
// different convention only needs compensating factors here.

namespace phaseshift::bessel {

// Magnitude above which n_l (or n_l') is treated as overflowed.
inline constexpr double kOverflowGuard = 1e290;

struct BesselEval {
  int l_max = 0;
  double x = 0.0;
  std::vector<double> j;   // j[l] = j_l(x)
  std::vector<double> n;   // n[l] = n_l(x)
  std::vector<double> jp;  // jp[l] = j_l'(x)
  std::vector<double> np;  // np[l] = n_l'(x)
};

// All four sequences for l = 0..l_max. Throws DomainError for x <= 0 or a
// negative l_max, BesselOverflow naming the first l whose n_l would exceed
// kOverflowGuard.
BesselEval evaluate(int l_max, double x);

// Like evaluate, but truncates at the last order before overflow instead of
// throwing. The returned l_max may be smaller than requested (never below 0).
BesselEval evaluate_until_overflow(int l_max, double x);

}  // namespace phaseshift::bessel
