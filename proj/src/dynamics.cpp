#include "greenedge/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "greenedge/errors.hpp"

namespace greenedge {

namespace {

double normal_cdf(double x, double mean, double stddev) {
  return 0.5 * std::erfc(-(x - mean) / (stddev * std::sqrt(2.0)));
}

}  // namespace

Matrix default_chain(int n, double stay) {
  if (n < 1) throw ConfigError("chain size must be at least 1");
  if (stay < 0.0 || stay > 1.0) throw ConfigError("stay probability outside [0, 1]");
  if (n == 1) return {{1.0}};
  Matrix rows(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    rows[i][i] = stay;
    const double move = 1.0 - stay;
    if (i == 0) {
      rows[i][1] = move;
    } else if (i == n - 1) {
      rows[i][n - 2] = move;
    } else {
      rows[i][i - 1] = move / 2.0;
      rows[i][i + 1] = move / 2.0;
    }
  }
  return rows;
}

ExogenousState step_exogenous(const ScenarioConfig& config,
                              const ExogenousState& state, SplitRng& rng) {
  ExogenousState next;
  next.workload_idx = static_cast<int>(
      rng.categorical(config.transition_workload.at(state.workload_idx)));
  next.env_idx = static_cast<int>(
      rng.categorical(config.transition_env.at(state.env_idx)));
  next.congestion_idx = static_cast<int>(
      rng.categorical(config.transition_congestion.at(state.congestion_idx)));
  return next;
}

int sample_green(const ScenarioConfig& config, int env_idx, SplitRng& rng) {
  const double watts = rng.normal(config.green_mean_watts.at(env_idx),
                                  config.green_std_watts.at(env_idx));
  return config.watts_to_units(std::max(watts, 0.0));
}

GreenDistribution green_pmf(const ScenarioConfig& config, int env_idx) {
  GreenDistribution dist;
  dist.mean_watts = config.green_mean_watts.at(env_idx);
  dist.std_watts = config.green_std_watts.at(env_idx);

  const double units_per_watt = config.slot_hours / config.energy_unit_wh;
  if (dist.std_watts == 0.0) {
    const int k = config.watts_to_units(std::max(dist.mean_watts, 0.0));
    dist.pmf.assign(k + 1, 0.0);
    dist.pmf[k] = 1.0;
    return dist;
  }

  const double cap_watts = std::max(dist.mean_watts, 0.0) + 6.0 * dist.std_watts;
  const int last = std::max(config.watts_to_units(cap_watts), 0);
  dist.pmf.assign(last + 1, 0.0);
  // Unit k collects watt values rounding to k (negatives fold into k = 0);
  // the upper tail beyond the cap folds into the last bin so the masses
  // sum to one exactly.
  double below = 0.0;
  for (int k = 0; k < last; ++k) {
    const double upper_watts = (k + 0.5) / units_per_watt;
    const double cdf = normal_cdf(upper_watts, dist.mean_watts, dist.std_watts);
    dist.pmf[k] = cdf - below;
    below = cdf;
  }
  dist.pmf[last] = 1.0 - below;
  return dist;
}

}  // namespace greenedge
