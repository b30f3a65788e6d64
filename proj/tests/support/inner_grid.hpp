#pragma once

#include <algorithm>
#include <vector>

#include "greenedge/config.hpp"
#include "greenedge/model.hpp"

namespace greenedge::testing {

struct GridOptimum {
  double local_rate = 0.0;
  double delay = 0.0;
};

/// Exhaustive reference for the per-slot delay minimization: evaluate the
/// objective on a fixed-step grid over the local rate (endpoint included).
inline GridOptimum grid_search_inner(const ScenarioConfig& config,
                                     double arrival, double congestion,
                                     int servers, double step = 0.01) {
  const double base = wireless_delay(arrival, config.wireless_capacity);
  if (servers == 0) return {0.0, base + arrival * congestion};

  const double capacity = servers * config.service_rate;
  const double hi = std::min(arrival, capacity * (1.0 - 1e-6));
  std::vector<double> grid;
  for (double mu = 0.0; mu < hi; mu += step) grid.push_back(mu);
  grid.push_back(hi);

  GridOptimum best{0.0, base + arrival * congestion};
  for (double mu : grid) {
    const double value = base + local_delay(servers, mu, config.service_rate) +
                         offload_delay(arrival, mu, congestion);
    if (value < best.delay) best = {mu, value};
  }
  return best;
}

}  // namespace greenedge::testing
