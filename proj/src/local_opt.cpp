#include "phaseshift/local_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>

#include "phaseshift/errors.hpp"

namespace phaseshift {

void LocalOptParams::validate() const {
  std::ostringstream os;
  if (!(eps_r > 0.0)) os << "eps_r must be positive";
  else if (!(line_tol > 0.0)) os << "line_tol must be positive";
  else if (!(f_tol > 0.0)) os << "f_tol must be positive";
  else if (max_sweeps <= 0) os << "max_sweeps must be positive";
  const auto msg = os.str();
  if (!msg.empty()) throw ValidationError(msg);
}

namespace {

constexpr double kInvGolden = 0.6180339887498949;

class IntervalBuilder {
 public:
  // Requires slack + t*rate >= 0.
  void require(double slack, double rate) {
    slack = std::max(slack, 0.0);
    if (rate > 0.0) lo_ = std::max(lo_, -slack / rate);
    else if (rate < 0.0) hi_ = std::min(hi_, slack / -rate);
  }
  FeasibleInterval result() const {
    if (!std::isfinite(lo_) || !std::isfinite(hi_)) return {};
    return {lo_, hi_};
  }

 private:
  double lo_ = -std::numeric_limits<double>::infinity();
  double hi_ = std::numeric_limits<double>::infinity();
};

std::vector<double> basis_vector(std::size_t dim, std::size_t i) {
  std::vector<double> e(dim, 0.0);
  e[i] = 1.0;
  return e;
}

}  // namespace

FeasibleInterval feasible_interval(const Configuration& q, std::span<const double> u,
                                   const AdmissibleSet& adm) {
  const std::size_t m = q.layers();
  if (u.size() != 2 * m) throw DomainError("direction length does not match configuration");
  if (m == 0) return {};
  IntervalBuilder b;
  b.require(q.radii[0], u[0]);
  for (std::size_t i = 0; i + 1 < m; ++i)
    b.require(q.radii[i + 1] - q.radii[i], u[i + 1] - u[i]);
  b.require(adm.support_radius - q.radii[m - 1], -u[m - 1]);
  for (std::size_t i = 0; i < m; ++i) {
    b.require(q.values[i] - adm.q_low, u[m + i]);
    b.require(adm.q_high - q.values[i], -u[m + i]);
  }
  return b.result();
}

Evaluated line_minimize(const ConfigObjective& f, const Evaluated& start,
                        std::span<const double> u, const AdmissibleSet& adm, double tol) {
  const auto interval = feasible_interval(start.config, u, adm);
  double u_norm = 0.0;
  for (const double x : u) u_norm = std::max(u_norm, std::abs(x));
  if (u_norm == 0.0 || !(interval.hi > interval.lo)) return start;

  const auto origin = start.config.coordinates();
  Evaluated best = start;
  std::vector<double> coords(origin.size());
  auto evaluate_at = [&](double t) {
    for (std::size_t i = 0; i < coords.size(); ++i) coords[i] = origin[i] + t * u[i];
    Evaluated e{Configuration::from_coordinates(coords), 0.0};
    adm.project(e.config);
    e.value = f(e.config);
    if (e.value < best.value) best = e;
    return e.value;
  };

  const double t_tol = tol / u_norm;
  double a = interval.lo;
  double b = interval.hi;
  if (a != 0.0) evaluate_at(a);
  if (b != 0.0) evaluate_at(b);
  double c = b - kInvGolden * (b - a);
  double d = a + kInvGolden * (b - a);
  double fc = evaluate_at(c);
  double fd = evaluate_at(d);
  while (b - a > t_tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvGolden * (b - a);
      fc = evaluate_at(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvGolden * (b - a);
      fd = evaluate_at(d);
    }
  }
  return best;
}

Configuration line_minimize(const ConfigObjective& f, const Configuration& q,
                            std::span<const double> u, const AdmissibleSet& adm,
                            double tol) {
  return line_minimize(f, Evaluated{q, f(q)}, u, adm, tol).config;
}

Evaluated basic_powell(const ConfigObjective& f, const Configuration& q0,
                       const AdmissibleSet& adm, const LocalOptParams& params) {
  params.validate();
  if (!adm.contains(q0)) throw DomainError("Powell start point is not admissible");

  Evaluated current{q0, f(q0)};
  const std::size_t dim = q0.dimension();
  if (dim == 0) return current;

  std::vector<std::size_t> order(dim);
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (int sweep = 0; sweep < params.max_sweeps; ++sweep) {
    const Evaluated anchor = current;

    // Trial minima from the anchor, used only to order the directions.
    std::vector<double> trial(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      const auto e = basis_vector(dim, i);
      trial[i] = line_minimize(f, anchor, e, adm, params.line_tol).value;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return trial[x] < trial[y]; });

    Evaluated walk = anchor;
    for (const std::size_t i : order)
      walk = line_minimize(f, walk, basis_vector(dim, i), adm, params.line_tol);

    const auto from = anchor.config.coordinates();
    const auto to = walk.config.coordinates();
    std::vector<double> v(dim);
    for (std::size_t i = 0; i < dim; ++i) v[i] = to[i] - from[i];
    Evaluated next = line_minimize(f, anchor, v, adm, params.line_tol);
    // The walk end lies on the same line; keep it if the search missed it.
    if (walk.value < next.value) next = walk;

    const double decrease = anchor.value - next.value;
    current = next;
    if (decrease < params.f_tol * (std::abs(anchor.value) + 1e-30)) break;
    if (params.direction_order == DirectionOrder::reset_to_basis)
      std::iota(order.begin(), order.end(), std::size_t{0});
  }
  return current;
}

namespace {

enum class MergeKind { down, up };

struct MergeCandidate {
  std::size_t i;  // 1-based layer index as in the down/up scan
  MergeKind kind;
  Configuration config;  // configuration with the two values equalized
};

// All equalizations of adjacent values, including the virtual zero layer
// on [r_M, R]. Ordered by i, "down" before "up".
std::vector<MergeCandidate> merge_candidates(const Configuration& q,
                                             const AdmissibleSet& adm) {
  const std::size_t m = q.layers();
  std::vector<MergeCandidate> out;
  for (std::size_t i = 1; i <= m + 1; ++i) {
    if (i >= 2) {
      Configuration c = q;
      c.values[i - 2] = i <= m ? q.values[i - 1] : 0.0;
      out.push_back({i, MergeKind::down, std::move(c)});
    }
    if (i <= m) {
      if (i == m && q.radii[m - 1] >= adm.support_radius) continue;  // empty virtual layer
      Configuration c = q;
      if (i < m) c.values[i] = q.values[i - 1];
      else c.radii[m - 1] = adm.support_radius;
      out.push_back({i, MergeKind::up, std::move(c)});
    }
  }
  return out;
}

// Replaces the equalized pair by a single layer spanning both intervals.
Configuration apply_merge(const Configuration& q, const MergeCandidate& cand) {
  const std::size_t m = q.layers();
  Configuration out = q;
  auto erase_at = [](std::vector<double>& v, std::size_t idx) {
    v.erase(v.begin() + static_cast<std::ptrdiff_t>(idx));
  };
  if (cand.kind == MergeKind::down) {
    if (cand.i <= m) {
      // Layers i-1 and i keep value v_i and outer radius r_i.
      erase_at(out.radii, cand.i - 2);
      erase_at(out.values, cand.i - 2);
    } else {
      // Last layer joins the zero exterior.
      out.radii.pop_back();
      out.values.pop_back();
    }
  } else {
    if (cand.i < m) {
      // Layers i and i+1 keep value v_i and outer radius r_{i+1}.
      erase_at(out.radii, cand.i - 1);
      erase_at(out.values, cand.i);
    } else {
      out.radii[m - 1] = cand.config.radii[m - 1];
    }
  }
  return out;
}

}  // namespace

Evaluated reduction_procedure(const ConfigObjective& f, const Configuration& q,
                              const AdmissibleSet& adm, double eps_r) {
  if (!(eps_r > 0.0)) throw DomainError("eps_r must be positive");
  if (!adm.contains(q)) throw DomainError("reduction start point is not admissible");

  Evaluated current{q, f(q)};
  while (current.value != 0.0 && current.config.layers() > 0) {
    const auto candidates = merge_candidates(current.config, adm);
    std::optional<std::size_t> winner;
    double smallest = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const double change = std::abs(current.value - f(candidates[c].config));
      if (change < smallest) {
        smallest = change;
        winner = c;
      }
    }
    if (!winner || !(smallest < eps_r * current.value)) break;
    Configuration merged = apply_merge(current.config, candidates[*winner]);
    const double value = f(merged);
    current = {std::move(merged), value};
  }
  return current;
}

Evaluated lmm(const ConfigObjective& f, const Configuration& q0,
              const AdmissibleSet& adm, const LocalOptParams& params) {
  params.validate();
  const Evaluated reduced = reduction_procedure(f, q0, adm, params.eps_r);
  const Evaluated minimized = basic_powell(f, reduced.config, adm, params);
  Evaluated final_point = reduction_procedure(f, minimized.config, adm, params.eps_r);
  // A merge may cost up to eps_r of the objective; never end above the
  // reduced start.
  if (final_point.value > reduced.value) final_point = minimized;
  return final_point;
}

}  // namespace phaseshift
