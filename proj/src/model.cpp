#include "greenedge/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "greenedge/errors.hpp"

namespace greenedge {

namespace {

// Keeps the queue strictly stable when the whole arrival fits locally.
constexpr double kStabilityMargin = 1e-6;

double arrival_of(const ScenarioConfig& config, const SystemState& state) {
  return config.workload_levels.at(state.workload_idx);
}

double congestion_of(const ScenarioConfig& config, const SystemState& state) {
  return config.congestion_levels.at(state.congestion_idx);
}

int action_budget(const ScenarioConfig& config, const SystemState& state) {
  return std::max(state.battery - op_power(config, arrival_of(config, state)), 0);
}

void require_feasible(const ScenarioConfig& config, const SystemState& state,
                      int power_units) {
  if (power_units < 0 || power_units % config.server_power_units != 0) {
    throw InfeasibleDecisionError("power demand " + std::to_string(power_units) +
                                  " is not on the server power grid");
  }
  const int servers = power_units / config.server_power_units;
  if (servers > config.max_servers) {
    throw InfeasibleDecisionError("power demand " + std::to_string(power_units) +
                                  " needs more than max_servers servers");
  }
  if (power_units > action_budget(config, state)) {
    throw InfeasibleDecisionError(
        "power demand " + std::to_string(power_units) +
        " exceeds the battery budget " + std::to_string(action_budget(config, state)));
  }
}

InnerSolution solve_inner(const ScenarioConfig& config, double arrival,
                          double congestion, int servers) {
  InnerSolution solution;
  solution.servers = servers;
  solution.wireless_delay = wireless_delay(arrival, config.wireless_capacity);
  if (servers == 0) {
    solution.offload_delay = arrival * congestion;
    return solution;
  }
  const double capacity = servers * config.service_rate;
  const double hi = std::min(arrival, capacity * (1.0 - kStabilityMargin));
  const double stationary = capacity - std::sqrt(capacity / congestion);
  solution.local_rate = std::clamp(stationary, 0.0, hi);
  solution.local_delay = local_delay(servers, solution.local_rate, config.service_rate);
  solution.offload_delay = offload_delay(arrival, solution.local_rate, congestion);
  return solution;
}

}  // namespace

double wireless_delay(double arrival, double capacity) {
  const double load = arrival / capacity;
  if (load >= 1.0) {
    throw ConfigError("wireless load factor " + std::to_string(load) +
                      " >= 1 (arrival rate must stay below capacity)");
  }
  return arrival / (capacity * (1.0 - load));
}

double local_delay(int servers, double local_rate, double service_rate) {
  if (local_rate <= 0.0) return 0.0;
  const double capacity = servers * service_rate;
  if (local_rate >= capacity) {
    throw InfeasibleDecisionError("local rate " + std::to_string(local_rate) +
                                  " saturates " + std::to_string(servers) +
                                  " servers");
  }
  return local_rate / (capacity - local_rate);
}

double offload_delay(double arrival, double local_rate, double congestion) {
  if (local_rate > arrival) {
    throw InfeasibleDecisionError("local rate exceeds the arrival rate");
  }
  return (arrival - local_rate) * congestion;
}

int op_power(const ScenarioConfig& config, double arrival) {
  return config.static_power_units +
         config.watts_to_units(config.dyn_power_coeff * arrival);
}

int com_power(const ScenarioConfig& config, int servers, double /*local_rate*/) {
  if (servers < 0 || servers > config.max_servers) {
    throw InfeasibleDecisionError("server count " + std::to_string(servers) +
                                  " outside [0, max_servers]");
  }
  return servers * config.server_power_units;
}

bool backup_regime(const ScenarioConfig& config, const SystemState& state) {
  return op_power(config, arrival_of(config, state)) > state.battery;
}

std::vector<int> feasible_actions(const ScenarioConfig& config,
                                  const SystemState& state) {
  const int budget = action_budget(config, state);
  const int max_servers = std::min(config.max_servers, budget / config.server_power_units);
  std::vector<int> actions;
  actions.reserve(max_servers + 1);
  for (int servers = 0; servers <= max_servers; ++servers) {
    actions.push_back(config.action_units(servers));
  }
  return actions;
}

InnerSolution inner_optimize(const ScenarioConfig& config,
                             const SystemState& state, int power_units) {
  require_feasible(config, state, power_units);
  return solve_inner(config, arrival_of(config, state),
                     congestion_of(config, state),
                     power_units / config.server_power_units);
}

CostBreakdown realized_cost(const ScenarioConfig& config,
                            const SystemState& state, int power_units,
                            int green_units) {
  const double arrival = arrival_of(config, state);
  const double congestion = congestion_of(config, state);
  const int operation = op_power(config, arrival);

  CostBreakdown cost;
  cost.utilization = arrival / config.wireless_capacity;
  if (backup_regime(config, state)) {
    if (power_units != 0) {
      throw InfeasibleDecisionError(
          "computing power must be zero when the backup supply runs");
    }
    cost.wireless_delay = wireless_delay(arrival, config.wireless_capacity);
    cost.offload_delay = arrival * congestion;
    cost.backup_cost = config.backup_cost_coeff * operation;
  } else {
    const InnerSolution inner = inner_optimize(config, state, power_units);
    cost.wireless_delay = inner.wireless_delay;
    cost.local_delay = inner.local_delay;
    cost.offload_delay = inner.offload_delay;
    const int discharged = config.depreciation_includes_operation
                               ? operation + power_units
                               : power_units;
    cost.depreciation =
        config.depreciation_cost * std::max(discharged - green_units, 0);
  }
  cost.total = cost.wireless_delay + cost.local_delay + cost.offload_delay +
               cost.backup_cost + cost.depreciation;
  return cost;
}

int battery_transition(const ScenarioConfig& config, const SystemState& state,
                       int power_units, int green_units) {
  const int capacity = config.battery_capacity_units;
  if (backup_regime(config, state)) {
    return std::min(state.battery + green_units, capacity);
  }
  require_feasible(config, state, power_units);
  const int operation = op_power(config, arrival_of(config, state));
  return std::clamp(state.battery - operation - power_units + green_units, 0,
                    capacity);
}

PostDecisionState pds(const ScenarioConfig& config, const SystemState& state,
                      int power_units) {
  PostDecisionState post;
  post.workload_idx = state.workload_idx;
  post.env_idx = state.env_idx;
  post.congestion_idx = state.congestion_idx;
  if (backup_regime(config, state)) {
    post.post_battery = state.battery;
  } else {
    require_feasible(config, state, power_units);
    const int operation = op_power(config, arrival_of(config, state));
    post.post_battery = std::max(state.battery - operation - power_units, 0);
  }
  return post;
}

DelayTable::DelayTable(const ScenarioConfig& config)
    : congestion_count_(config.congestion_count()),
      servers_(config.max_servers + 1) {
  solutions_.reserve(static_cast<std::size_t>(config.workload_count()) *
                     congestion_count_ * servers_);
  backup_costs_.reserve(static_cast<std::size_t>(config.workload_count()) *
                        congestion_count_);
  for (int li = 0; li < config.workload_count(); ++li) {
    const double arrival = config.workload_levels[li];
    for (int hi = 0; hi < congestion_count_; ++hi) {
      const double congestion = config.congestion_levels[hi];
      for (int servers = 0; servers < servers_; ++servers) {
        solutions_.push_back(solve_inner(config, arrival, congestion, servers));
      }
      const double full_offload =
          wireless_delay(arrival, config.wireless_capacity) + arrival * congestion;
      backup_costs_.push_back(full_offload + config.backup_cost_coeff *
                                                 op_power(config, arrival));
    }
  }
}

const InnerSolution& DelayTable::at(int workload_idx, int congestion_idx,
                                    int servers) const {
  return solutions_[(static_cast<std::size_t>(workload_idx) * congestion_count_ +
                     congestion_idx) *
                        servers_ +
                    servers];
}

double DelayTable::backup_cost(int workload_idx, int congestion_idx) const {
  return backup_costs_[static_cast<std::size_t>(workload_idx) * congestion_count_ +
                       congestion_idx];
}

}  // namespace greenedge
