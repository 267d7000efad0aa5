#include "phaseshift/configuration.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phaseshift/errors.hpp"

namespace phaseshift {

std::vector<double> Configuration::coordinates() const {
  std::vector<double> out(radii);
  out.insert(out.end(), values.begin(), values.end());
  return out;
}

Configuration Configuration::from_coordinates(std::span<const double> coords) {
  if (coords.size() % 2 != 0)
    throw DomainError("configuration coordinates must have even length");
  const std::size_t m = coords.size() / 2;
  Configuration c;
  c.radii.assign(coords.begin(), coords.begin() + static_cast<std::ptrdiff_t>(m));
  c.values.assign(coords.begin() + static_cast<std::ptrdiff_t>(m), coords.end());
  return c;
}

Potential Configuration::to_potential() const { return Potential(radii, values); }

void AdmissibleSet::validate() const {
  std::ostringstream os;
  if (m_max == 0) os << "m_max must be positive";
  else if (!(support_radius > 0.0) || !std::isfinite(support_radius))
    os << "support radius must be positive, got " << support_radius;
  else if (!std::isfinite(q_low) || !std::isfinite(q_high) || !(q_low < q_high))
    os << "value bounds must satisfy q_low < q_high, got [" << q_low << ", " << q_high
       << "]";
  const auto msg = os.str();
  if (!msg.empty()) throw ValidationError(msg);
}

bool AdmissibleSet::contains(const Configuration& c) const {
  if (c.radii.size() != c.values.size() || c.layers() > m_max) return false;
  double prev = 0.0;
  for (const double r : c.radii) {
    if (!(r >= prev) || r > support_radius) return false;
    prev = r;
  }
  return std::all_of(c.values.begin(), c.values.end(),
                     [&](double v) { return v >= q_low && v <= q_high; });
}

void AdmissibleSet::project(Configuration& c) const {
  double prev = 0.0;
  for (auto& r : c.radii) {
    r = std::clamp(r, prev, support_radius);
    prev = r;
  }
  for (auto& v : c.values) v = std::clamp(v, q_low, q_high);
}

ConfigObjective phi_objective(const ShiftTarget& target) {
  target.validate();
  return [target](const Configuration& c) { return phi(c.to_potential(), target); };
}

}  // namespace phaseshift
