#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "phaseshift/configuration.hpp"
#include "phaseshift/local_opt.hpp"
#include "phaseshift/objective.hpp"

// Reduced Sample Random Search: draw a uniform batch of admissible
// configurations, keep the best fraction gamma of it, and run the local
// minimization from each kept point.

namespace phaseshift {

using ProgressCallback = std::function<void(std::size_t done, std::size_t total)>;

struct SearchParams {
  std::size_t batch_size = 10000;
  double gamma = 0.01;
  std::uint64_t seed = 0x5eed5eedULL;
  AdmissibleSet adm;
  LocalOptParams local;
  double dedup_tol = 0.05;
  bool pin_outer_radius = true;  // r_M := R in every batch member
  // Worker threads for objective evaluation and local searches; results do
  // not depend on it.
  unsigned jobs = 1;
  ProgressCallback progress;

  std::size_t reduced_size() const;
  void validate() const;
};

struct LocalMinimum {
  Configuration config;
  double phi = 0.0;
  std::size_t start_index = 0;  // position of the start point in the batch
  std::uint64_t seed = 0;       // sub-seed that generated the start point
};

struct SearchFailure {
  std::size_t start_index = 0;
  std::string message;
};

struct SearchOutcome {
  std::vector<LocalMinimum> minima;  // ascending Phi, deduplicated
  std::vector<SearchFailure> failures;
  std::uint64_t evaluations = 0;
  double wall_time = 0.0;  // seconds
  double best_sample_phi = 0.0;
  std::size_t sample_size = 0;
};

struct SampleEntry {
  std::size_t index = 0;
  Evaluated point;
};

// Independent stream seed for batch member `index`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

// Uniform draw of one configuration with adm.m_max layers from `sub_seed`.
Configuration random_configuration(std::uint64_t sub_seed, const AdmissibleSet& adm,
                                   bool pin_outer_radius);

std::vector<Configuration> random_batch(const SearchParams& params);

// The ceil(gamma * batch.size()) members with the smallest objective,
// ascending (ties by batch index). Members whose evaluation throws are
// dropped first; throws EmptySample if none survive.
std::vector<SampleEntry> reduced_sample(const std::vector<Configuration>& batch,
                                        const ConfigObjective& f, double gamma,
                                        unsigned jobs = 1);

// Upper value bound keeping every layer safely oscillatory at the target
// energy: min(q_high, (1 - 1e-3) k^2 / coupling).
AdmissibleSet search_admissible_set(const AdmissibleSet& adm, const ShiftTarget& target);

SearchOutcome reduced_random_search(const SearchParams& params, const ShiftTarget& target);

}  // namespace phaseshift
