#include "greenedge/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "greenedge/errors.hpp"

namespace greenedge {

StateSpace::StateSpace(const ScenarioConfig& config)
    : n_workload(config.workload_count()),
      n_env(config.env_count()),
      n_congestion(config.congestion_count()),
      n_battery(config.battery_capacity_units + 1) {}

SystemState StateSpace::state(std::size_t flat) const {
  SystemState s;
  s.battery = static_cast<int>(flat % n_battery);
  flat /= n_battery;
  s.congestion_idx = static_cast<int>(flat % n_congestion);
  flat /= n_congestion;
  s.env_idx = static_cast<int>(flat % n_env);
  s.workload_idx = static_cast<int>(flat / n_env);
  return s;
}

TransitionOperator::TransitionOperator(const ScenarioConfig& config)
    : space_(config),
      workload_rows_(config.transition_workload),
      env_rows_(config.transition_env),
      congestion_rows_(config.transition_congestion) {
  greens_.reserve(config.env_count());
  for (int e = 0; e < config.env_count(); ++e) {
    greens_.push_back(green_pmf(config, e));
  }
  scratch_a_.resize(space_.size());
  scratch_b_.resize(space_.size());
}

void TransitionOperator::apply(std::span<const double> normal_values,
                               std::span<double> pds_values) const {
  const int nl = space_.n_workload;
  const int ne = space_.n_env;
  const int nh = space_.n_congestion;
  const int nb = space_.n_battery;

  // Contract one exogenous axis at a time; the battery axis stays intact
  // until the final green-energy mixing step.
  std::fill(scratch_a_.begin(), scratch_a_.end(), 0.0);
  for (int l = 0; l < nl; ++l) {
    for (int e = 0; e < ne; ++e) {
      const std::size_t le = (static_cast<std::size_t>(l) * ne + e) * nh;
      for (int h = 0; h < nh; ++h) {
        double* out = &scratch_a_[(le + h) * nb];
        const auto& row = congestion_rows_[h];
        for (int hn = 0; hn < nh; ++hn) {
          const double w = row[hn];
          if (w == 0.0) continue;
          const double* in = &normal_values[(le + hn) * nb];
          for (int b = 0; b < nb; ++b) out[b] += w * in[b];
        }
      }
    }
  }

  std::fill(scratch_b_.begin(), scratch_b_.end(), 0.0);
  for (int l = 0; l < nl; ++l) {
    const std::size_t lbase = static_cast<std::size_t>(l) * ne;
    for (int e = 0; e < ne; ++e) {
      const auto& row = env_rows_[e];
      for (int en = 0; en < ne; ++en) {
        const double w = row[en];
        if (w == 0.0) continue;
        for (int h = 0; h < nh; ++h) {
          double* out = &scratch_b_[((lbase + e) * nh + h) * nb];
          const double* in = &scratch_a_[((lbase + en) * nh + h) * nb];
          for (int b = 0; b < nb; ++b) out[b] += w * in[b];
        }
      }
    }
  }

  std::fill(scratch_a_.begin(), scratch_a_.end(), 0.0);
  const std::size_t ehb = static_cast<std::size_t>(ne) * nh * nb;
  for (int l = 0; l < nl; ++l) {
    const auto& row = workload_rows_[l];
    double* out = &scratch_a_[l * ehb];
    for (int ln = 0; ln < nl; ++ln) {
      const double w = row[ln];
      if (w == 0.0) continue;
      const double* in = &scratch_b_[ln * ehb];
      for (std::size_t i = 0; i < ehb; ++i) out[i] += w * in[i];
    }
  }

  for (int l = 0; l < nl; ++l) {
    for (int e = 0; e < ne; ++e) {
      const auto& pmf = greens_[e].pmf;
      for (int h = 0; h < nh; ++h) {
        const std::size_t base = space_.index(l, e, h, 0);
        const double* in = &scratch_a_[base];
        double* out = &pds_values[base];
        for (int pb = 0; pb < nb; ++pb) {
          double expectation = 0.0;
          for (std::size_t g = 0; g < pmf.size(); ++g) {
            const int next = std::min<int>(pb + static_cast<int>(g), nb - 1);
            expectation += pmf[g] * in[next];
          }
          out[pb] = expectation;
        }
      }
    }
  }
}

std::vector<double> TransitionOperator::apply(
    std::span<const double> normal_values) const {
  std::vector<double> result(space_.size());
  apply(normal_values, result);
  return result;
}

ExpectedCostTable::ExpectedCostTable(const ScenarioConfig& config)
    : config_(&config), delay_(config) {
  op_power_.reserve(config.workload_count());
  int max_op = 0;
  for (double arrival : config.workload_levels) {
    op_power_.push_back(op_power(config, arrival));
    max_op = std::max(max_op, op_power_.back());
  }
  const int max_demand = config.action_units(config.max_servers) +
                         (config.depreciation_includes_operation ? max_op : 0);
  deficit_by_demand_.reserve(config.env_count());
  for (int e = 0; e < config.env_count(); ++e) {
    const GreenDistribution dist = green_pmf(config, e);
    std::vector<double> deficit(max_demand + 1, 0.0);
    for (int demand = 0; demand <= max_demand; ++demand) {
      double expectation = 0.0;
      for (std::size_t g = 0; g < dist.pmf.size(); ++g) {
        const int gap = demand - static_cast<int>(g);
        if (gap <= 0) break;  // pmf indices only grow
        expectation += dist.pmf[g] * gap;
      }
      deficit[demand] = expectation;
    }
    deficit_by_demand_.push_back(std::move(deficit));
  }
}

double ExpectedCostTable::expected_deficit(int workload_idx, int env_idx,
                                           int servers) const {
  int demand = config_->action_units(servers);
  if (config_->depreciation_includes_operation) demand += op_power_[workload_idx];
  return deficit_by_demand_[env_idx][demand];
}

double ExpectedCostTable::cost(int workload_idx, int env_idx, int congestion_idx,
                               int servers) const {
  return delay_.delay(workload_idx, congestion_idx, servers) +
         config_->depreciation_cost *
             expected_deficit(workload_idx, env_idx, servers);
}

namespace {

// One Bellman-operator application: out = T(in). Returns the sup-norm
// update and optionally extracts the minimizing decisions.
double bellman_sweep(const ScenarioConfig& config, const StateSpace& space,
                     const TransitionOperator& transition,
                     const ExpectedCostTable& cost,
                     std::span<const double> in, std::span<double> out,
                     std::vector<PolicyEntry>* policy) {
  static thread_local std::vector<double> pds_values;
  pds_values.resize(space.size());
  transition.apply(in, pds_values);

  const double discount = config.discount;
  const int per_server = config.server_power_units;
  double delta = 0.0;
  for (int l = 0; l < space.n_workload; ++l) {
    const int operation = op_power(config, config.workload_levels[l]);
    for (int e = 0; e < space.n_env; ++e) {
      for (int h = 0; h < space.n_congestion; ++h) {
        const std::size_t base = space.index(l, e, h, 0);
        const double backup = cost.backup_cost(l, h);
        for (int b = 0; b < space.n_battery; ++b) {
          double best;
          int best_servers = 0;
          if (operation > b) {
            best = backup + discount * pds_values[base + b];
          } else {
            const int budget = b - operation;
            const int max_servers =
                std::min(config.max_servers, budget / per_server);
            best = std::numeric_limits<double>::infinity();
            for (int m = 0; m <= max_servers; ++m) {
              const double value = cost.cost(l, e, h, m) +
                                   discount * pds_values[base + budget - m * per_server];
              if (value < best) {
                best = value;
                best_servers = m;
              }
            }
          }
          out[base + b] = best;
          delta = std::max(delta, std::abs(best - in[base + b]));
          if (policy) {
            PolicyEntry& entry = (*policy)[base + b];
            entry.servers = best_servers;
            entry.power_units = config.action_units(best_servers);
            entry.local_rate =
                cost.delay_table().at(l, h, best_servers).local_rate;
          }
        }
      }
    }
  }
  return delta;
}

}  // namespace

OracleSolution value_iteration(const ScenarioConfig& config, double tol,
                               int max_iterations, std::size_t state_cap) {
  config.validate();
  if (tol <= 0.0) throw ConfigError("value iteration tolerance must be > 0");
  const StateSpace space(config);
  if (space.size() > state_cap) {
    throw NumericError("state space has " + std::to_string(space.size()) +
                       " states, above the enumeration cap of " +
                       std::to_string(state_cap));
  }
  const TransitionOperator transition(config);
  const ExpectedCostTable cost(config);

  const double threshold =
      tol * (1.0 - config.discount) / (2.0 * config.discount);
  std::vector<double> current(space.size(), 0.0);
  std::vector<double> next(space.size(), 0.0);

  int iterations = 0;
  double delta = std::numeric_limits<double>::infinity();
  while (iterations < max_iterations) {
    ++iterations;
    delta = bellman_sweep(config, space, transition, cost, current, next, nullptr);
    if (!std::isfinite(delta)) {
      throw NumericError("non-finite value encountered in sweep " +
                         std::to_string(iterations));
    }
    current.swap(next);
    if (delta <= threshold) break;
  }
  if (delta > threshold) {
    throw NumericError("value iteration did not converge within " +
                       std::to_string(max_iterations) + " sweeps");
  }

  OracleSolution solution;
  solution.policy.space = space;
  solution.policy.entries.resize(space.size());
  bellman_sweep(config, space, transition, cost, current, next,
                &solution.policy.entries);
  solution.values.space = space;
  solution.values.values = std::move(next);
  solution.values.iterations = iterations;
  solution.values.final_delta = delta;
  return solution;
}

ValueTable pds_value(const ScenarioConfig& config, const ValueTable& normal) {
  const StateSpace space(config);
  if (!(space == normal.space) || normal.values.size() != space.size()) {
    throw ConfigError("value table does not match the scenario's state space");
  }
  ValueTable result;
  result.space = space;
  result.values = TransitionOperator(config).apply(normal.values);
  result.iterations = normal.iterations;
  return result;
}

double bellman_residual(const ScenarioConfig& config, const ValueTable& table) {
  const StateSpace space(config);
  if (!(space == table.space) || table.values.size() != space.size()) {
    throw ConfigError("value table does not match the scenario's state space");
  }
  const TransitionOperator transition(config);
  const ExpectedCostTable cost(config);
  std::vector<double> image(space.size());
  return bellman_sweep(config, space, transition, cost, table.values, image,
                       nullptr);
}

std::vector<PolicyMonotonicityViolation> check_monotone_policy(
    const PolicyTable& policy) {
  std::vector<PolicyMonotonicityViolation> violations;
  const StateSpace& space = policy.space;
  for (int l = 0; l < space.n_workload; ++l) {
    for (int e = 0; e < space.n_env; ++e) {
      for (int h = 0; h < space.n_congestion; ++h) {
        const std::size_t base = space.index(l, e, h, 0);
        for (int b = 0; b + 1 < space.n_battery; ++b) {
          const int low = policy.entries[base + b].power_units;
          const int high = policy.entries[base + b + 1].power_units;
          if (low > high) {
            violations.push_back({l, e, h, b, low, high});
          }
        }
      }
    }
  }
  return violations;
}

ValueShapeReport check_value_shape(const ValueTable& table) {
  constexpr double kSlack = 1e-9;
  ValueShapeReport report;
  const StateSpace& space = table.space;
  for (int l = 0; l < space.n_workload; ++l) {
    for (int e = 0; e < space.n_env; ++e) {
      for (int h = 0; h < space.n_congestion; ++h) {
        const std::size_t base = space.index(l, e, h, 0);
        for (int b = 0; b + 1 < space.n_battery; ++b) {
          ++report.monotonicity_pairs;
          const double rise = table.values[base + b + 1] - table.values[base + b];
          if (rise > kSlack) {
            report.monotonicity.push_back({l, e, h, b, rise});
          }
        }
        for (int b = 1; b + 1 < space.n_battery; ++b) {
          ++report.convexity_triples;
          const double second_difference = table.values[base + b + 1] -
                                           2.0 * table.values[base + b] +
                                           table.values[base + b - 1];
          if (second_difference < -kSlack) {
            report.convexity.push_back({l, e, h, b, -second_difference});
          }
        }
      }
    }
  }
  return report;
}

}  // namespace greenedge
