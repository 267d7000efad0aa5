#include "phaseshift/forward_solver.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "phaseshift/errors.hpp"
#include "phaseshift/riccati_bessel.hpp"

namespace phaseshift {

namespace {

void check_wavenumber(double k) {
  if (!(k > 0.0) || !std::isfinite(k)) {
    std::ostringstream os;
    os << "wavenumber k must be positive and finite, got " << k;
    throw DomainError(os.str());
  }
}

Matrix2 assemble(double kappa_i, double kappa_next, double j_in, double jp_in,
                 double n_in, double np_in, double j_out, double jp_out,
                 double n_out, double np_out) {
  Matrix2 m;
  m.a11 = kappa_next * j_in * np_out - kappa_i * jp_in * n_out;
  m.a12 = kappa_next * n_in * np_out - kappa_i * np_in * n_out;
  m.a21 = kappa_i * jp_in * j_out - kappa_next * j_in * jp_out;
  m.a22 = kappa_i * np_in * j_out - kappa_next * n_in * jp_out;
  return m;
}

void renormalize(InteriorState& s) {
  const double big = std::max(std::abs(s.a), std::abs(s.b));
  if (big == 0.0 || (big <= kRescaleBound && big >= 1.0 / kRescaleBound)) return;
  int e = 0;
  std::frexp(big, &e);
  s.a = std::ldexp(s.a, -e);
  s.b = std::ldexp(s.b, -e);
  s.scale_exponent += e;
}

}  // namespace

LayerWavenumbers compute_wavenumbers(const Potential& p, double k, double coupling) {
  check_wavenumber(k);
  const double k2 = k * k;
  const double floor2 = (kKappaMinFactor * k) * (kKappaMinFactor * k);
  LayerWavenumbers w;
  w.kappa.reserve(p.layer_count() + 1);
  const auto values = p.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double kappa2 = k2 - coupling * values[i];
    if (!(kappa2 > floor2)) throw EvanescentLayer(i + 1, kappa2);
    w.kappa.push_back(std::sqrt(kappa2));
  }
  w.kappa.push_back(k);
  return w;
}

Matrix2 interface_matrix(int l, double kappa_i, double kappa_next, double r_i) {
  if (!(kappa_i > 0.0) || !(kappa_next > 0.0) || !(r_i > 0.0) || l < 0)
    throw DomainError("interface_matrix requires positive wavenumbers and radius");
  const auto in = bessel::evaluate(l, kappa_i * r_i);
  const auto out = bessel::evaluate(l, kappa_next * r_i);
  return assemble(kappa_i, kappa_next, in.j[l], in.jp[l], in.n[l], in.np[l],
                  out.j[l], out.jp[l], out.n[l], out.np[l]);
}

std::vector<InteriorState> propagate_all(const Potential& p, double k, int l_max,
                                         double coupling) {
  if (l_max < 0) throw DomainError("l_max must be non-negative");
  const auto waves = compute_wavenumbers(p, k, coupling);
  const auto radii = p.radii();

  std::vector<InteriorState> states(static_cast<std::size_t>(l_max) + 1);
  // Orders still carrying the untouched regular solution. When the free
  // functions at an interface overflow for such an order, everything inside
  // that radius affects its coefficients only at a relative level far below
  // double precision, so the regular solution restarts in the next layer.
  std::vector<bool> pristine(states.size(), true);

  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double kin = waves.kappa[i];
    const double kout = waves.kappa[i + 1];
    const double r = radii[i];
    const auto in = bessel::evaluate_until_overflow(l_max, kin * r);
    const auto out = bessel::evaluate_until_overflow(l_max, kout * r);
    for (int l = 0; l <= l_max; ++l) {
      auto& s = states[l];
      if (l > in.l_max || l > out.l_max) {
        if (pristine[l]) continue;
        throw BesselOverflow(l, l > in.l_max ? kin * r : kout * r);
      }
      const Matrix2 m = assemble(kin, kout, in.j[l], in.jp[l], in.n[l], in.np[l],
                                 out.j[l], out.jp[l], out.n[l], out.np[l]);
      // The second column holds n_l(kappa_in r) and may overflow on thin
      // inner layers; it is irrelevant while the state is still regular.
      const double a = s.b == 0.0 ? m.a11 * s.a : m.a11 * s.a + m.a12 * s.b;
      const double b = s.b == 0.0 ? m.a21 * s.a : m.a21 * s.a + m.a22 * s.b;
      if (!std::isfinite(a) || !std::isfinite(b)) throw BesselOverflow(l, kin * r);
      s.a = a;
      s.b = b;
      renormalize(s);
      pristine[l] = false;
    }
  }
  return states;
}

InteriorState propagate(const Potential& p, double k, int l, double coupling) {
  if (l < 0) throw DomainError("angular momentum l must be non-negative");
  return propagate_all(p, k, l, coupling).back();
}

double phase_shift_from_state(const InteriorState& s) {
  if (s.a == 0.0) return s.b > 0.0 ? -std::numbers::pi / 2 : std::numbers::pi / 2;
  return -std::atan(s.b / s.a);
}

double phase_shift(const Potential& p, double k, int l, double coupling) {
  return phase_shift_from_state(propagate(p, k, l, coupling));
}

PhaseShiftTable phase_shift_table(const Potential& p, double k, int l_max,
                                  double coupling) {
  const auto states = propagate_all(p, k, l_max, coupling);
  PhaseShiftTable t;
  t.k = k;
  t.l_max = l_max;
  t.delta.reserve(states.size());
  for (const auto& s : states) t.delta.push_back(phase_shift_from_state(s));
  return t;
}

}  // namespace phaseshift
