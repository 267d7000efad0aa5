#include "phaseshift/riccati_bessel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phaseshift/errors.hpp"

namespace phaseshift::bessel {

namespace {

constexpr int kSeriesTerms = 20;
constexpr double kRescaleAbove = 1e250;

bool use_series(int l, double x) { return x < 0.1 * (l + 1); }

// Ascending series: j_l(x) = x^{l+1}/(2l+1)!! * sum_k (-x^2/2)^k / (k! (2l+3)...(2l+2k+1)).
double series_j(int l, double x) {
  double prefactor = x;
  for (int m = 1; m <= l; ++m) prefactor *= x / (2.0 * m + 1.0);
  const double half_x2 = -0.5 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < kSeriesTerms; ++k) {
    term *= half_x2 / (k * (2.0 * l + 2.0 * k + 1.0));
    sum += term;
  }
  return prefactor * sum;
}

void validate(int l_max, double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    std::ostringstream os;
    os << "Riccati-Bessel argument must be positive and finite, got " << x;
    throw DomainError(os.str());
  }
  if (l_max < 0) throw DomainError("Riccati-Bessel l_max must be non-negative");
}

// Fills n[0..] upward; returns the number of orders computed before the guard tripped.
int fill_n(int l_max, double x, std::vector<double>& n) {
  n.assign(static_cast<std::size_t>(l_max) + 1, 0.0);
  n[0] = -std::cos(x);
  if (l_max == 0) return 1;
  n[1] = n[0] / x - std::sin(x);
  if (std::abs(n[1]) > kOverflowGuard) return 1;
  for (int l = 1; l < l_max; ++l) {
    const double next = (2.0 * l + 1.0) / x * n[l] - n[l - 1];
    if (!(std::abs(next) <= kOverflowGuard)) return l + 1;
    n[l + 1] = next;
  }
  return l_max + 1;
}

void fill_j(int l_max, double x, const std::vector<double>& n,
            std::vector<double>& j) {
  j.assign(static_cast<std::size_t>(l_max) + 1, 0.0);
  j[0] = std::sin(x);
  if (l_max == 0) return;

  if (l_max <= x) {
    // Upward recurrence is stable while l <= x.
    j[1] = j[0] / x - std::cos(x);
    for (int l = 1; l < l_max; ++l)
      j[l + 1] = (2.0 * l + 1.0) / x * j[l] - j[l - 1];
    return;
  }

  // Highest order handled by the downward recurrence; the rest use the series.
  int l_hi = l_max;
  while (l_hi >= 0 && use_series(l_hi, x)) --l_hi;

  if (l_hi >= 1) {
    const double top_base = std::max(static_cast<double>(l_hi), x);
    const int l_top =
        static_cast<int>(top_base) + 20 + static_cast<int>(std::sqrt(40.0 * top_base));
    double upper = 0.0;
    double current = 1e-30;
    for (int l = l_top; l > 0; --l) {
      if (l <= l_hi) j[l] = current;
      const double lower = (2.0 * l + 1.0) / x * current - upper;
      upper = current;
      current = lower;
      if (std::abs(current) > kRescaleAbove) {
        current /= kRescaleAbove;
        upper /= kRescaleAbove;
        for (int m = l; m <= l_hi; ++m) j[m] /= kRescaleAbove;
      }
    }
    j[0] = current;
    // Casoratian j_1 n_0 - j_0 n_1 = 1 fixes the scale without dividing by sin x.
    const double scale = 1.0 / (j[1] * n[0] - j[0] * n[1]);
    for (int l = 1; l <= l_hi; ++l) j[l] *= scale;
    j[0] = std::sin(x);
  }
  for (int l = std::max(l_hi + 1, 1); l <= l_max; ++l) j[l] = series_j(l, x);
}

BesselEval compute(int l_max, double x, bool truncate) {
  validate(l_max, x);
  BesselEval out;
  out.x = x;

  std::vector<double> n;
  int valid = fill_n(l_max, x, n);

  // Derivatives can overflow one order earlier than the values.
  std::vector<double> np(static_cast<std::size_t>(valid), 0.0);
  np[0] = std::sin(x);
  for (int l = 1; l < valid; ++l) {
    const double d = n[l - 1] - l / x * n[l];
    if (!(std::abs(d) <= kOverflowGuard)) {
      valid = l;
      break;
    }
    np[l] = d;
  }
  if (valid <= l_max && !truncate) throw BesselOverflow(valid, x);

  const int l_ok = valid - 1;
  std::vector<double> j;
  fill_j(l_ok, x, n, j);

  out.l_max = l_ok;
  n.resize(static_cast<std::size_t>(valid));
  np.resize(static_cast<std::size_t>(valid));
  out.jp.assign(static_cast<std::size_t>(valid), 0.0);
  out.jp[0] = std::cos(x);
  for (int l = 1; l <= l_ok; ++l) out.jp[l] = j[l - 1] - l / x * j[l];
  out.j = std::move(j);
  out.n = std::move(n);
  out.np = std::move(np);
  return out;
}

}  // namespace

BesselEval evaluate(int l_max, double x) { return compute(l_max, x, false); }

BesselEval evaluate_until_overflow(int l_max, double x) {
  return compute(l_max, x, true);
}

}  // namespace phaseshift::bessel
