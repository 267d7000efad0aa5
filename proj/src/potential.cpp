#include "phaseshift/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phaseshift/errors.hpp"

namespace phaseshift {

Potential::Potential(std::vector<double> radii, std::vector<double> values) {
  if (radii.size() != values.size()) {
    std::ostringstream os;
    os << "potential has " << radii.size() << " radii but " << values.size()
       << " values";
    throw ValidationError(os.str());
  }
  double inner = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double r = radii[i];
    const double v = values[i];
    if (!std::isfinite(r) || !std::isfinite(v)) {
      std::ostringstream os;
      os << "layer " << i + 1 << " has a non-finite radius or value";
      throw ValidationError(os.str());
    }
    if (r < inner - kRadiusTieTolerance) {
      std::ostringstream os;
      os << "layer " << i + 1 << " radius " << r
         << " is not increasing (previous " << inner << ")";
      throw ValidationError(os.str());
    }
    if (r - inner <= kRadiusTieTolerance) {
      // Zero-width layer: the next one starts where this would have ended.
      if (!radii_.empty()) radii_.back() = std::max(radii_.back(), r);
      continue;
    }
    radii_.push_back(r);
    values_.push_back(v);
    inner = r;
  }
}

double Potential::value_at(double r) const {
  const auto it = std::upper_bound(radii_.begin(), radii_.end(), r);
  if (it == radii_.end()) return 0.0;
  return values_[static_cast<std::size_t>(it - radii_.begin())];
}

std::vector<double> sample_profile(const Potential& p, double r_max, std::size_t count) {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double r = count > 1 ? r_max * static_cast<double>(i) / (count - 1) : 0.0;
    out[i] = p.value_at(r);
  }
  return out;
}

double profile_sup_distance(const Potential& a, const Potential& b, double r_max,
                            std::size_t count) {
  double worst = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double r = count > 1 ? r_max * static_cast<double>(i) / (count - 1) : 0.0;
    worst = std::max(worst, std::abs(a.value_at(r) - b.value_at(r)));
  }
  return worst;
}

double measure_where_differs(const Potential& a, const Potential& b, double threshold) {
  std::vector<double> breaks(a.radii().begin(), a.radii().end());
  breaks.insert(breaks.end(), b.radii().begin(), b.radii().end());
  std::sort(breaks.begin(), breaks.end());
  double measure = 0.0;
  double left = 0.0;
  for (const double right : breaks) {
    if (right > left &&
        std::abs(a.value_at(left) - b.value_at(left)) > threshold)
      measure += right - left;
    left = std::max(left, right);
  }
  return measure;
}

}  // namespace phaseshift
