#include "phaseshift/objective.hpp"

#include <cmath>
#include <sstream>

#include "phaseshift/errors.hpp"
#include "phaseshift/forward_solver.hpp"

namespace phaseshift {

void ShiftTarget::validate() const {
  if (l_start < 0 || l_end < l_start) {
    std::ostringstream os;
    os << "invalid objective range l = " << l_start << ".." << l_end;
    throw DomainError(os.str());
  }
  if (delta_tilde.size() <= static_cast<std::size_t>(l_end)) {
    std::ostringstream os;
    os << "target has " << delta_tilde.size() << " shifts but l_end = " << l_end;
    throw DomainError(os.str());
  }
  double denominator = 0.0;
  for (int l = l_start; l <= l_end; ++l) denominator += delta_tilde[l] * delta_tilde[l];
  if (!(denominator > 0.0)) throw DomainError("target shifts vanish on the summed range");
}

ShiftTarget make_target(const Potential& reference, double k, int l_start, int l_end,
                        double coupling) {
  ShiftTarget t;
  t.k = k;
  t.l_start = l_start;
  t.l_end = l_end;
  t.coupling = coupling;
  t.delta_tilde = phase_shift_table(reference, k, l_end, coupling).delta;
  t.validate();
  return t;
}

double phi_from_shifts(std::span<const double> delta, const ShiftTarget& target) {
  target.validate();
  if (delta.size() <= static_cast<std::size_t>(target.l_end))
    throw DomainError("candidate shifts do not cover the summed range");
  double numerator = 0.0;
  double denominator = 0.0;
  for (int l = target.l_start; l <= target.l_end; ++l) {
    const double diff = delta[l] - target.delta_tilde[l];
    numerator += diff * diff;
    denominator += target.delta_tilde[l] * target.delta_tilde[l];
  }
  return std::sqrt(numerator / denominator);
}

double phi(const Potential& candidate, const ShiftTarget& target) {
  target.validate();
  const auto table =
      phase_shift_table(candidate, target.k, target.l_end, target.coupling);
  return phi_from_shifts(table.delta, target);
}

}  // namespace phaseshift
