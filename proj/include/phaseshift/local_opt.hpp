#pragma once

#include <span>

#include "phaseshift/configuration.hpp"

// Derivative-free local minimization over admissible configurations:
// a modified Powell scheme with coordinate directions, greedy merging of
// adjacent layers, and their composition.

namespace phaseshift {

// How the direction order carries over between Powell cycles. Both variants
// start every cycle from coordinate directions; they differ only in which
// order ties are broken when re-sorting.
enum class DirectionOrder {
  preserve_reindexed,  // keep the order produced by the previous cycle
  reset_to_basis,      // restart from e_1..e_2M each cycle
};

struct LocalOptParams {
  double eps_r = 0.1;       // relative Phi change below which layers merge
  double line_tol = 1e-7;   // final bracket width of each line search
  double f_tol = 1e-8;      // relative per-cycle decrease that ends Powell
  int max_sweeps = 50;
  DirectionOrder direction_order = DirectionOrder::preserve_reindexed;

  void validate() const;
};

// Largest [t_lo, t_hi] (containing 0) with x + t*u inside the admissible set.
struct FeasibleInterval {
  double lo = 0.0;
  double hi = 0.0;
};
FeasibleInterval feasible_interval(const Configuration& q, std::span<const double> u,
                                   const AdmissibleSet& adm);

// Golden-section search for the minimum of f along q + t*u on the feasible
// segment. The segment endpoints are also tried. Never returns a point worse
// than `start`; an empty segment or zero direction returns `start`.
Evaluated line_minimize(const ConfigObjective& f, const Evaluated& start,
                        std::span<const double> u, const AdmissibleSet& adm, double tol);
Configuration line_minimize(const ConfigObjective& f, const Configuration& q,
                            std::span<const double> u, const AdmissibleSet& adm,
                            double tol);

Evaluated basic_powell(const ConfigObjective& f, const Configuration& q0,
                       const AdmissibleSet& adm, const LocalOptParams& params);

// Repeatedly merges the adjacent pair (the last layer and the zero exterior
// out to adm.support_radius included) whose equalization changes f the least,
// as long as that change is below eps_r * f. Not a descent step: each merge
// may raise f by up to that amount.
Evaluated reduction_procedure(const ConfigObjective& f, const Configuration& q,
                              const AdmissibleSet& adm, double eps_r);

// Reduce, minimize in the reduced space, reduce again.
Evaluated lmm(const ConfigObjective& f, const Configuration& q0,
              const AdmissibleSet& adm, const LocalOptParams& params);

}  // namespace phaseshift
