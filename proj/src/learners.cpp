#include "greenedge/learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "greenedge/errors.hpp"

namespace greenedge {

namespace {

int operation_power(const ScenarioConfig& config, const SystemState& state) {
  return op_power(config, config.workload_levels[state.workload_idx]);
}

int max_feasible_servers(const ScenarioConfig& config, const SystemState& state) {
  const int budget = state.battery - operation_power(config, state);
  if (budget < 0) return -1;  // backup regime
  return std::min(config.max_servers, budget / config.server_power_units);
}

ControlDecision decision_for(const ScenarioConfig& config, const DelayTable& delay,
                             const SystemState& state, int servers) {
  const InnerSolution& inner =
      delay.at(state.workload_idx, state.congestion_idx, servers);
  ControlDecision decision;
  decision.power_units = config.action_units(servers);
  decision.servers = servers;
  decision.local_rate = inner.local_rate;
  decision.offload_rate =
      config.workload_levels[state.workload_idx] - inner.local_rate;
  return decision;
}

ControlDecision full_offload(const ScenarioConfig& config, const SystemState& state) {
  ControlDecision decision;
  decision.offload_rate = config.workload_levels[state.workload_idx];
  return decision;
}

double visit_rate(std::uint64_t visits, double exponent) {
  return std::pow(static_cast<double>(visits), -exponent);
}

}  // namespace

// ---------------------------------------------------------------------------
// PdsLearner

PdsLearner::PdsLearner(const ScenarioConfig& config)
    : config_(&config), space_(config), delay_(config) {
  op_power_.reserve(config.workload_count());
  for (double arrival : config.workload_levels) {
    op_power_.push_back(op_power(config, arrival));
  }
  deficit_.assign(static_cast<std::size_t>(config.env_count()) *
                      (config.max_servers + 1),
                  0.0);
  pds_values_.assign(space_.size(), 0.0);
  normal_scratch_.assign(space_.n_battery, 0.0);
  env_visits_.assign(config.env_count(), 0);
  triple_visits_.assign(space_.triple_count(), 0);
}

double PdsLearner::deficit_estimate(int env_idx, int servers) const {
  return deficit_[static_cast<std::size_t>(env_idx) * (config_->max_servers + 1) +
                  servers];
}

double PdsLearner::cost_estimate(const SystemState& state, int servers) const {
  return delay_.delay(state.workload_idx, state.congestion_idx, servers) +
         config_->depreciation_cost * deficit_estimate(state.env_idx, servers);
}

ControlDecision PdsLearner::greedy_decision(const SystemState& state) const {
  const int max_servers = max_feasible_servers(*config_, state);
  if (max_servers < 0) return full_offload(*config_, state);

  const int budget = state.battery - op_power_[state.workload_idx];
  const std::size_t base = space_.index(state.workload_idx, state.env_idx,
                                        state.congestion_idx, 0);
  double best = std::numeric_limits<double>::infinity();
  int best_servers = 0;
  for (int m = 0; m <= max_servers; ++m) {
    const int post_battery = budget - config_->action_units(m);
    const double value = cost_estimate(state, m) +
                         config_->discount * pds_values_[base + post_battery];
    if (value < best) {
      best = value;
      best_servers = m;
    }
  }
  return decision_for(*config_, delay_, state, best_servers);
}

ControlDecision PdsLearner::select(const SystemState& state) {
  return greedy_decision(state);
}

void PdsLearner::observe(const SystemState& state,
                         const ControlDecision& /*decision*/, int green_units,
                         const CostBreakdown& /*cost*/,
                         const SystemState& next_state) {
  const int server_levels = config_->max_servers + 1;

  // Deficit estimates for the observed environment, at every demand level.
  const double cost_rate = visit_rate(++env_visits_[state.env_idx],
                                      config_->learn.cost_rate_exponent);
  double* deficit_row =
      &deficit_[static_cast<std::size_t>(state.env_idx) * server_levels];
  for (int m = 0; m < server_levels; ++m) {
    const double shortfall =
        std::max(config_->action_units(m) - green_units, 0);
    deficit_row[m] += cost_rate * (shortfall - deficit_row[m]);
  }

  // Refresh the normal values of the next exogenous triple at every battery
  // level, using the updated cost estimates and current value estimates.
  const std::size_t next_base =
      space_.index(next_state.workload_idx, next_state.env_idx,
                   next_state.congestion_idx, 0);
  const int next_operation = op_power_[next_state.workload_idx];
  SystemState probe = next_state;
  for (int b = 0; b < space_.n_battery; ++b) {
    double value;
    if (next_operation > b) {
      value = delay_.backup_cost(next_state.workload_idx,
                                 next_state.congestion_idx) +
              config_->discount * pds_values_[next_base + b];
    } else {
      probe.battery = b;
      const int budget = b - next_operation;
      const int max_servers =
          std::min(config_->max_servers, budget / config_->server_power_units);
      value = std::numeric_limits<double>::infinity();
      for (int m = 0; m <= max_servers; ++m) {
        const int post_battery = budget - config_->action_units(m);
        const double candidate =
            cost_estimate(probe, m) +
            config_->discount * pds_values_[next_base + post_battery];
        value = std::min(value, candidate);
      }
    }
    normal_scratch_[b] = value;
  }

  // Value estimates for the observed triple at every post-decision battery
  // level; the realized arrival links each level to its refreshed target.
  const std::size_t triple = space_.triple_index(
      state.workload_idx, state.env_idx, state.congestion_idx);
  const double value_rate =
      visit_rate(++triple_visits_[triple], config_->learn.value_rate_exponent);
  double* values = &pds_values_[triple * space_.n_battery];
  for (int pb = 0; pb < space_.n_battery; ++pb) {
    const int target = std::min(pb + green_units, space_.n_battery - 1);
    values[pb] += value_rate * (normal_scratch_[target] - values[pb]);
  }
}

PolicyTable PdsLearner::greedy_policy() const {
  PolicyTable policy;
  policy.space = space_;
  policy.entries.resize(space_.size());
  for (std::size_t i = 0; i < space_.size(); ++i) {
    const ControlDecision decision = greedy_decision(space_.state(i));
    policy.entries[i] = {decision.power_units, decision.servers,
                         decision.local_rate};
  }
  return policy;
}

// ---------------------------------------------------------------------------
// QLearner

QLearner::QLearner(const ScenarioConfig& config, std::uint64_t seed)
    : config_(&config),
      space_(config),
      delay_(config),
      q_(space_.size() * (config.max_servers + 1), 0.0),
      visits_(space_.size() * (config.max_servers + 1), 0),
      rng_(seed, "qlearning") {}

double QLearner::q_value(const SystemState& state, int servers) const {
  return q_[space_.index(state) * (config_->max_servers + 1) + servers];
}

double QLearner::min_feasible_q(const SystemState& state) const {
  const int max_servers = std::max(max_feasible_servers(*config_, state), 0);
  const double* row = &q_[space_.index(state) * (config_->max_servers + 1)];
  double best = row[0];
  for (int m = 1; m <= max_servers; ++m) best = std::min(best, row[m]);
  return best;
}

ControlDecision QLearner::select(const SystemState& state) {
  ++slots_seen_;
  const int max_servers = max_feasible_servers(*config_, state);
  if (max_servers < 0) return full_offload(*config_, state);

  const double epsilon =
      std::max(config_->learn.q_epsilon_min,
               std::pow(static_cast<double>(slots_seen_),
                        -config_->learn.q_epsilon_exponent));
  int chosen = 0;
  if (rng_.uniform() < epsilon) {
    chosen = std::min(static_cast<int>(rng_.uniform() * (max_servers + 1)),
                      max_servers);
  } else {
    const double* row = &q_[space_.index(state) * (config_->max_servers + 1)];
    double best = std::numeric_limits<double>::infinity();
    for (int m = 0; m <= max_servers; ++m) {
      if (row[m] < best) {
        best = row[m];
        chosen = m;
      }
    }
  }
  return decision_for(*config_, delay_, state, chosen);
}

void QLearner::observe(const SystemState& state, const ControlDecision& decision,
                       int /*green_units*/, const CostBreakdown& cost,
                       const SystemState& next_state) {
  const std::size_t cell =
      space_.index(state) * (config_->max_servers + 1) + decision.servers;
  const double rate =
      visit_rate(++visits_[cell], config_->learn.q_rate_exponent);
  const double target =
      cost.total + config_->discount * min_feasible_q(next_state);
  q_[cell] += rate * (target - q_[cell]);
}

std::vector<double> QLearner::normal_value_estimates() const {
  std::vector<double> values(space_.size());
  for (std::size_t i = 0; i < space_.size(); ++i) {
    values[i] = min_feasible_q(space_.state(i));
  }
  return values;
}

// ---------------------------------------------------------------------------
// MyopicPolicy

MyopicPolicy::MyopicPolicy(const ScenarioConfig& config, bool max_spend)
    : config_(&config),
      delay_(config),
      deficit_(static_cast<std::size_t>(config.env_count()) *
                   (config.max_servers + 1),
               0.0),
      env_visits_(config.env_count(), 0),
      max_spend_(max_spend) {}

ControlDecision MyopicPolicy::select(const SystemState& state) {
  const int max_servers = max_feasible_servers(*config_, state);
  if (max_servers < 0) return full_offload(*config_, state);
  if (max_spend_) return decision_for(*config_, delay_, state, max_servers);

  const double* deficit_row =
      &deficit_[static_cast<std::size_t>(state.env_idx) *
                (config_->max_servers + 1)];
  double best = std::numeric_limits<double>::infinity();
  int best_servers = 0;
  for (int m = 0; m <= max_servers; ++m) {
    const double value =
        delay_.delay(state.workload_idx, state.congestion_idx, m) +
        config_->depreciation_cost * deficit_row[m];
    if (value < best) {
      best = value;
      best_servers = m;
    }
  }
  return decision_for(*config_, delay_, state, best_servers);
}

void MyopicPolicy::observe(const SystemState& state,
                           const ControlDecision& /*decision*/, int green_units,
                           const CostBreakdown& /*cost*/,
                           const SystemState& /*next_state*/) {
  const double rate = visit_rate(++env_visits_[state.env_idx],
                                 config_->learn.cost_rate_exponent);
  double* deficit_row = &deficit_[static_cast<std::size_t>(state.env_idx) *
                                  (config_->max_servers + 1)];
  for (int m = 0; m <= config_->max_servers; ++m) {
    const double shortfall = std::max(config_->action_units(m) - green_units, 0);
    deficit_row[m] += rate * (shortfall - deficit_row[m]);
  }
}

// ---------------------------------------------------------------------------
// FixedPolicy

FixedPolicy::FixedPolicy(const ScenarioConfig& config, int level_units)
    : config_(&config), delay_(config), level_units_(level_units) {
  if (level_units < 0) throw ConfigError("fixed power level must be >= 0");
  name_ = "fixed:" + std::to_string(level_units) + "u";
}

ControlDecision FixedPolicy::select(const SystemState& state) {
  const int max_servers = max_feasible_servers(*config_, state);
  if (max_servers < 0) return full_offload(*config_, state);
  const int servers =
      std::min(max_servers, level_units_ / config_->server_power_units);
  return decision_for(*config_, delay_, state, servers);
}

// ---------------------------------------------------------------------------
// LiteralCostTable

LiteralCostTable::LiteralCostTable(const ScenarioConfig& config)
    : config_(&config),
      space_(config),
      delay_(config),
      env_visits_(config.env_count(), 0) {
  const int server_levels = config.max_servers + 1;
  costs_.resize(space_.size() * server_levels);
  for (std::size_t i = 0; i < space_.size(); ++i) {
    const SystemState state = space_.state(i);
    for (int m = 0; m < server_levels; ++m) {
      costs_[i * server_levels + m] =
          delay_.delay(state.workload_idx, state.congestion_idx, m);
    }
  }
}

void LiteralCostTable::update(int env_idx, int green_units) {
  const double rate = visit_rate(++env_visits_[env_idx],
                                 config_->learn.cost_rate_exponent);
  const int server_levels = config_->max_servers + 1;
  for (int l = 0; l < space_.n_workload; ++l) {
    for (int h = 0; h < space_.n_congestion; ++h) {
      for (int m = 0; m < server_levels; ++m) {
        const double realized =
            delay_.delay(l, h, m) +
            config_->depreciation_cost *
                std::max(config_->action_units(m) - green_units, 0);
        const std::size_t base = space_.index(l, env_idx, h, 0) * server_levels;
        for (int b = 0; b < space_.n_battery; ++b) {
          const std::size_t cell =
              base + static_cast<std::size_t>(b) * server_levels + m;
          costs_[cell] += rate * (realized - costs_[cell]);
        }
      }
    }
  }
}

double LiteralCostTable::at(const SystemState& state, int servers) const {
  return costs_[space_.index(state) * (config_->max_servers + 1) + servers];
}

// ---------------------------------------------------------------------------

std::unique_ptr<Policy> make_policy(const ScenarioConfig& config,
                                    std::string_view selector,
                                    std::uint64_t seed, bool myopic_max_spend) {
  if (selector == "pds") return std::make_unique<PdsLearner>(config);
  if (selector == "qlearning") return std::make_unique<QLearner>(config, seed);
  if (selector == "myopic") {
    return std::make_unique<MyopicPolicy>(config, myopic_max_spend);
  }
  if (selector == "fixed") {
    return std::make_unique<FixedPolicy>(
        config, config.watts_to_units(config.learn.fixed_power_kw * 1000.0));
  }
  if (selector.starts_with("fixed:")) {
    const std::string text(selector.substr(6));
    double kw = 0.0;
    try {
      std::size_t consumed = 0;
      kw = std::stod(text, &consumed);
      if (consumed != text.size()) throw std::invalid_argument(text);
    } catch (const std::exception&) {
      throw ConfigError("cannot parse fixed power level: " + text);
    }
    if (kw < 0.0) throw ConfigError("fixed power level must be >= 0");
    return std::make_unique<FixedPolicy>(config,
                                         config.watts_to_units(kw * 1000.0));
  }
  throw ConfigError("unknown policy selector: " + std::string(selector));
}

}  // namespace greenedge
