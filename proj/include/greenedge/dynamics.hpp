#pragma once

#include <vector>

#include "greenedge/config.hpp"
#include "greenedge/rng.hpp"

namespace greenedge {

/// Indices into the three exogenous state spaces.
struct ExogenousState {
  int workload_idx = 0;
  int env_idx = 0;
  int congestion_idx = 0;

  bool operator==(const ExogenousState&) const = default;
};

/// Exact discretized distribution of the per-slot green-energy arrival for
/// one environment state: a normal in watts, truncated below zero,
/// converted to energy units and rounded half-up. The support is capped at
/// mean + 6 sigma; the residual tail mass is folded into the last bin so
/// the pmf sums to one exactly.
struct GreenDistribution {
  double mean_watts = 0.0;
  double std_watts = 0.0;
  std::vector<double> pmf;  // pmf[k] = P(arrival == k units)
};

/// Lazy reflecting random walk on n states: self-probability `stay`, the
/// remainder split equally between neighbors (all of it to the single
/// neighbor at the boundaries).
Matrix default_chain(int n, double stay);

/// Advance the three exogenous chains one slot. Consumes exactly three
/// rng words regardless of outcome.
ExogenousState step_exogenous(const ScenarioConfig& config,
                              const ExogenousState& state, SplitRng& rng);

/// Draw the slot's green-energy arrival in integer units for environment
/// state `env_idx`. Consumes exactly two rng words.
int sample_green(const ScenarioConfig& config, int env_idx, SplitRng& rng);

/// Exact pmf consistent with sample_green (needed by the offline solver).
GreenDistribution green_pmf(const ScenarioConfig& config, int env_idx);

}  // namespace greenedge
