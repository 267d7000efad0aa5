#include "phaseshift/errors.hpp"

#include <sstream>

namespace phaseshift {

namespace {

std::string overflow_message(int l, double x) {
  std::ostringstream os;
  os << "Riccati-Bessel n_" << l << "(" << x << ") exceeds the overflow guard";
  return os.str();
}

std::string evanescent_message(std::size_t layer, double kappa_squared) {
  std::ostringstream os;
  os << "layer " << layer << " is evanescent or nearly so (kappa^2 = "
     << kappa_squared << ")";
  return os.str();
}

}  // namespace

BesselOverflow::BesselOverflow(int l, double x)
    : Error(overflow_message(l, x)), l_(l), x_(x) {}

EvanescentLayer::EvanescentLayer(std::size_t layer, double kappa_squared)
    : Error(evanescent_message(layer, kappa_squared)),
      layer_(layer),
      kappa_squared_(kappa_squared) {}

}  // namespace phaseshift
