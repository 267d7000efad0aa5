#include "phaseshift/global_search.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "phaseshift/errors.hpp"

namespace phaseshift {

namespace {

constexpr double kEnergyMargin = 1e-3;
constexpr std::size_t kDedupGrid = 1000;

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// [0, 1) with 53 random bits.
double uniform01(std::uint64_t& state) {
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

// Runs body(i) for i in [0, count) on up to `jobs` threads. The first
// exception thrown by any body is rethrown after all workers finish.
template <class Body>
void parallel_for(std::size_t count, unsigned jobs, Body body) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(std::max(jobs, 1U), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::size_t SearchParams::reduced_size() const {
  const double raw = gamma * static_cast<double>(batch_size);
  // Absorb representation error such as 0.02 * 2000 = 40.000000000000007.
  return static_cast<std::size_t>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));
}

void SearchParams::validate() const {
  adm.validate();
  local.validate();
  std::ostringstream os;
  if (batch_size == 0) os << "batch size L must be positive";
  else if (!(gamma > 0.0 && gamma <= 1.0)) os << "gamma must lie in (0, 1], got " << gamma;
  else if (reduced_size() < 1) os << "gamma * L must be at least 1";
  else if (!(dedup_tol > 0.0)) os << "dedup_tol must be positive";
  const auto msg = os.str();
  if (!msg.empty()) throw ValidationError(msg);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t state = seed;
  const std::uint64_t base = splitmix64(state);
  std::uint64_t mixed = base ^ (index * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL);
  return splitmix64(mixed);
}

Configuration random_configuration(std::uint64_t sub_seed, const AdmissibleSet& adm,
                                   bool pin_outer_radius) {
  std::uint64_t state = sub_seed;
  Configuration c;
  c.values.resize(adm.m_max);
  c.radii.resize(adm.m_max);
  for (auto& v : c.values) v = adm.q_low + (adm.q_high - adm.q_low) * uniform01(state);
  // 1 - u lies in (0, 1], so radii fall in (0, R].
  for (auto& r : c.radii) r = adm.support_radius * (1.0 - uniform01(state));
  std::sort(c.radii.begin(), c.radii.end());
  if (pin_outer_radius) c.radii.back() = adm.support_radius;
  return c;
}

std::vector<Configuration> random_batch(const SearchParams& params) {
  params.validate();
  std::vector<Configuration> batch;
  batch.reserve(params.batch_size);
  for (std::size_t i = 0; i < params.batch_size; ++i)
    batch.push_back(random_configuration(derive_seed(params.seed, i), params.adm,
                                         params.pin_outer_radius));
  return batch;
}

std::vector<SampleEntry> reduced_sample(const std::vector<Configuration>& batch,
                                        const ConfigObjective& f, double gamma,
                                        unsigned jobs) {
  if (batch.empty()) throw EmptySample("batch is empty");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("gamma must lie in (0, 1]");

  std::vector<double> values(batch.size());
  std::vector<char> ok(batch.size(), 0);
  parallel_for(batch.size(), jobs, [&](std::size_t i) {
    try {
      values[i] = f(batch[i]);
      ok[i] = 1;
    } catch (const Error&) {
    }
  });

  std::vector<SampleEntry> entries;
  for (std::size_t i = 0; i < batch.size(); ++i)
    if (ok[i]) entries.push_back({i, {batch[i], values[i]}});
  if (entries.empty()) throw EmptySample("objective evaluation failed on every batch member");

  std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return a.point.value < b.point.value;
  });
  SearchParams sizing;
  sizing.batch_size = batch.size();
  sizing.gamma = gamma;
  const std::size_t keep = std::max<std::size_t>(1, sizing.reduced_size());
  if (entries.size() > keep) entries.resize(keep);
  return entries;
}

AdmissibleSet search_admissible_set(const AdmissibleSet& adm, const ShiftTarget& target) {
  AdmissibleSet out = adm;
  const double ceiling = (1.0 - kEnergyMargin) * target.k * target.k / target.coupling;
  if (target.coupling > 0.0) out.q_high = std::min(adm.q_high, ceiling);
  if (!(out.q_low < out.q_high)) {
    std::ostringstream os;
    os << "q_low = " << out.q_low << " leaves no room below the energy bound "
       << out.q_high;
    throw ValidationError(os.str());
  }
  return out;
}

SearchOutcome reduced_random_search(const SearchParams& params, const ShiftTarget& target) {
  const auto started = std::chrono::steady_clock::now();
  params.validate();
  target.validate();

  SearchParams effective = params;
  effective.adm = search_admissible_set(params.adm, target);

  std::atomic<std::uint64_t> evaluations{0};
  const ConfigObjective base = phi_objective(target);
  const ConfigObjective f = [&](const Configuration& c) {
    ++evaluations;
    return base(c);
  };

  const auto batch = random_batch(effective);
  const auto sample = reduced_sample(batch, f, effective.gamma, effective.jobs);

  std::vector<std::optional<Evaluated>> results(sample.size());
  std::vector<std::string> errors(sample.size());
  std::mutex progress_mutex;
  std::size_t done = 0;
  parallel_for(sample.size(), effective.jobs, [&](std::size_t s) {
    try {
      results[s] = lmm(f, sample[s].point.config, effective.adm, effective.local);
    } catch (const Error& e) {
      errors[s] = e.what();
    }
    if (effective.progress) {
      std::lock_guard lock(progress_mutex);
      effective.progress(++done, sample.size());
    }
  });

  SearchOutcome outcome;
  outcome.sample_size = sample.size();
  outcome.best_sample_phi = sample.front().point.value;
  std::vector<LocalMinimum> found;
  for (std::size_t s = 0; s < sample.size(); ++s) {
    const std::size_t index = sample[s].index;
    if (!results[s]) {
      outcome.failures.push_back({index, errors[s]});
      continue;
    }
    found.push_back({results[s]->config, results[s]->value, index,
                     derive_seed(effective.seed, index)});
  }
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
    return a.phi != b.phi ? a.phi < b.phi : a.start_index < b.start_index;
  });

  for (auto& candidate : found) {
    const Potential p = candidate.config.to_potential();
    const bool duplicate = std::any_of(
        outcome.minima.begin(), outcome.minima.end(), [&](const LocalMinimum& kept) {
          return profile_sup_distance(p, kept.config.to_potential(),
                                      effective.adm.support_radius,
                                      kDedupGrid) < effective.dedup_tol;
        });
    if (!duplicate) outcome.minima.push_back(std::move(candidate));
  }

  outcome.evaluations = evaluations.load();
  outcome.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return outcome;
}

}  // namespace phaseshift
