#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace phaseshift {

// Layers thinner than this are absorbed by their outer neighbour.
inline constexpr double kRadiusTieTolerance = 1e-12;

// Piecewise-constant spherically symmetric potential:
//   q(r) = values[i] on [radii[i-1], radii[i]),  radii[-1] = 0,
//   q(r) = 0 for r >= support_radius().
// An empty potential is identically zero.
class Potential {
 public:
  Potential() = default;

  // Throws ValidationError on mismatched lengths, non-finite entries,
  // negative or decreasing radii. Radii closer than kRadiusTieTolerance
  // (including a first radius at the origin) are merged.
  Potential(std::vector<double> radii, std::vector<double> values);

  std::span<const double> radii() const { return radii_; }
  std::span<const double> values() const { return values_; }
  std::size_t layer_count() const { return radii_.size(); }
  bool empty() const { return radii_.empty(); }
  double support_radius() const { return radii_.empty() ? 0.0 : radii_.back(); }

  double value_at(double r) const;

  friend bool operator==(const Potential&, const Potential&) = default;

 private:
  std::vector<double> radii_;
  std::vector<double> values_;
};

// Samples q(r) at `count` uniformly spaced points covering [0, r_max].
std::vector<double> sample_profile(const Potential& p, double r_max, std::size_t count);

// Sup-norm of q_a - q_b over a uniform grid on [0, r_max].
double profile_sup_distance(const Potential& a, const Potential& b, double r_max,
                            std::size_t count = 1000);

// Lebesgue measure of {r >= 0 : |q_a(r) - q_b(r)| > threshold}, exact for
// piecewise-constant potentials.
double measure_where_differs(const Potential& a, const Potential& b, double threshold);

}  // namespace phaseshift
