#pragma once

#include <span>
#include <vector>

#include "phaseshift/potential.hpp"

namespace phaseshift {

// Target shifts for the best-fit functional
//   Phi = sqrt( sum_{l=l_start}^{l_end} |delta_l - target_l|^2
//             / sum_{l=l_start}^{l_end} |target_l|^2 ).
struct ShiftTarget {
  double k = 0.0;
  std::vector<double> delta_tilde;  // indexed by l, starting at l = 0
  int l_start = 1;
  int l_end = 20;
  double coupling = 1.0;

  // Throws DomainError when the range is invalid, delta_tilde is too short,
  // or the denominator vanishes.
  void validate() const;
};

// Target built from the shifts of a reference potential, l = 0..l_end.
ShiftTarget make_target(const Potential& reference, double k, int l_start = 1,
                        int l_end = 20, double coupling = 1.0);

double phi_from_shifts(std::span<const double> delta, const ShiftTarget& target);

double phi(const Potential& candidate, const ShiftTarget& target);

}  // namespace phaseshift
