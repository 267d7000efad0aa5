#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "phaseshift/objective.hpp"
#include "phaseshift/potential.hpp"

namespace phaseshift {

// A point (r_1..r_M, v_1..v_M) of the layered search space. Unlike Potential,
// zero-width layers are allowed (r_{m-1} == r_m); they simply have no effect.
struct Configuration {
  std::vector<double> radii;
  std::vector<double> values;

  std::size_t layers() const { return radii.size(); }
  std::size_t dimension() const { return 2 * radii.size(); }

  // Radii first, then values.
  std::vector<double> coordinates() const;
  static Configuration from_coordinates(std::span<const double> coords);

  Potential to_potential() const;

  friend bool operator==(const Configuration&, const Configuration&) = default;
};

// Box bounds on the values, 0 <= r_1 <= ... <= r_M <= support_radius, and
// at most m_max layers.
struct AdmissibleSet {
  std::size_t m_max = 6;
  double support_radius = 3.0;
  double q_low = 0.0;
  double q_high = 9.0;

  // Throws ValidationError when the bounds are inconsistent.
  void validate() const;
  bool contains(const Configuration& c) const;
  // Moves c onto the set: clamps every coordinate to its box and repairs the
  // radius ordering. Used to absorb rounding after a line step.
  void project(Configuration& c) const;
};

using ConfigObjective = std::function<double(const Configuration&)>;

// Phi against `target`, evaluated on the potential of a configuration.
ConfigObjective phi_objective(const ShiftTarget& target);

struct Evaluated {
  Configuration config;
  double value = 0.0;
};

}  // namespace phaseshift
