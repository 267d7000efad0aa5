#include "phaseshift/ode_oracle.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <vector>

#include "phaseshift/errors.hpp"
#include "phaseshift/riccati_bessel.hpp"

namespace phaseshift {

void OdeSettings::validate() const {
  std::ostringstream os;
  if (step_count < 100) os << "step_count must be at least 100, got " << step_count;
  else if (!(r_start_factor > 0.0 && r_start_factor < 1.0))
    os << "r_start_factor must lie in (0, 1), got " << r_start_factor;
  else if (!(initial_scale > 0.0) || !std::isfinite(initial_scale))
    os << "initial_scale must be positive";
  const auto msg = os.str();
  if (!msg.empty()) throw DomainError(msg);
}

namespace {

// State (phi, psi = r phi') as a function of s = ln r:
//   phi_s = psi,  psi_s = psi + (l(l+1) - kappa2 r^2) phi.
using State = std::array<double, 2>;

State derivative(const State& y, double s, double kappa2, double centrifugal) {
  const double r = std::exp(s);
  return {y[1], y[1] + (centrifugal - kappa2 * r * r) * y[0]};
}

State rk4_step(const State& y, double s, double h, double kappa2, double centrifugal) {
  auto axpy = [](const State& a, double t, const State& b) {
    return State{a[0] + t * b[0], a[1] + t * b[1]};
  };
  const State k1 = derivative(y, s, kappa2, centrifugal);
  const State k2 = derivative(axpy(y, 0.5 * h, k1), s + 0.5 * h, kappa2, centrifugal);
  const State k3 = derivative(axpy(y, 0.5 * h, k2), s + 0.5 * h, kappa2, centrifugal);
  const State k4 = derivative(axpy(y, h, k3), s + h, kappa2, centrifugal);
  return {y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
          y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])};
}

void rescale(State& y) {
  const double big = std::max(std::abs(y[0]), std::abs(y[1]));
  if (big > 1e200 || (big < 1e-200 && big > 0.0)) {
    int e = 0;
    std::frexp(big, &e);
    y[0] = std::ldexp(y[0], -e);
    y[1] = std::ldexp(y[1], -e);
  }
}

}  // namespace

double phase_shift_ode(const Potential& p, double k, int l, const OdeSettings& s,
                       double coupling) {
  s.validate();
  if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("wavenumber k must be positive");
  if (l < 0) throw DomainError("angular momentum l must be non-negative");
  if (p.empty()) return 0.0;

  const double support = p.support_radius();
  const double r_start = s.r_start_factor * support;
  const auto radii = p.radii();
  const auto values = p.values();
  if (!(r_start < radii[0])) {
    std::ostringstream os;
    os << "r_start = " << r_start << " must lie inside the first layer (r_1 = "
       << radii[0] << ")";
    throw DomainError(os.str());
  }

  const std::size_t layers = radii.size();
  std::vector<double> kappa2(layers);
  std::vector<double> weight(layers);
  double total_weight = 0.0;
  for (std::size_t i = 0; i < layers; ++i) {
    const double inner = i == 0 ? r_start : radii[i - 1];
    kappa2[i] = k * k - coupling * values[i];
    weight[i] = (l + 1) * std::log(radii[i] / inner) +
                std::sqrt(std::abs(kappa2[i])) * (radii[i] - inner);
    total_weight += weight[i];
  }

  const double centrifugal = static_cast<double>(l) * (l + 1);
  // Positive multiple of the series start r^{l+1}/(2l+1)!!, (l+1) r^l/(2l+1)!!;
  // the common factor r^{l+1}/(2l+1)!! cannot change the phase.
  State y{s.initial_scale, s.initial_scale * (l + 1)};
  for (std::size_t i = 0; i < layers; ++i) {
    const double inner = i == 0 ? r_start : radii[i - 1];
    const double s0 = std::log(inner);
    const double s1 = std::log(radii[i]);
    const int steps = std::max(
        8, static_cast<int>(std::ceil(s.step_count * weight[i] / total_weight)));
    const double h = (s1 - s0) / steps;
    for (int n = 0; n < steps; ++n) {
      y = rk4_step(y, s0 + n * h, h, kappa2[i], centrifugal);
      rescale(y);
    }
    if (!std::isfinite(y[0]) || !std::isfinite(y[1]))
      throw DomainError("radial integration left the representable range");
  }

  const double x = k * support;
  const auto free = bessel::evaluate(l, x);
  const double phi = y[0];
  const double dphi_over_k = y[1] / support / k;
  const double a = phi * free.np[l] - dphi_over_k * free.n[l];
  const double b = dphi_over_k * free.j[l] - phi * free.jp[l];
  if (a == 0.0) return b > 0.0 ? -std::acos(0.0) : std::acos(0.0);
  return -std::atan(b / a);
}

}  // namespace phaseshift
