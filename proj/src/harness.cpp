#include "greenedge/harness.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "greenedge/csv.hpp"
#include "greenedge/dynamics.hpp"
#include "greenedge/errors.hpp"

namespace greenedge {

namespace {

SystemState initial_state(const ScenarioConfig& config) {
  SystemState s;
  s.workload_idx = config.init.workload_idx >= 0 ? config.init.workload_idx
                                                 : config.workload_count() / 2;
  s.env_idx = config.init.env_idx >= 0 ? config.init.env_idx
                                        : config.env_count() / 2;
  s.congestion_idx = config.init.congestion_idx >= 0
                         ? config.init.congestion_idx
                         : config.congestion_count() / 2;
  s.battery = config.init.battery_units >= 0 ? config.init.battery_units
                                             : config.battery_capacity_units;
  return s;
}

void check_decision(const ScenarioConfig& config, const SystemState& state,
                    const ControlDecision& decision) {
  if (decision.power_units != config.action_units(decision.servers) ||
      decision.servers < 0 || decision.servers > config.max_servers) {
    throw InfeasibleDecisionError(
        "policy returned a decision off the demand grid (demand " +
        std::to_string(decision.power_units) + ", servers " +
        std::to_string(decision.servers) + ")");
  }
  const int operation = op_power(config, config.workload_levels[state.workload_idx]);
  const int budget = std::max(state.battery - operation, 0);
  if (decision.power_units > budget) {
    throw InfeasibleDecisionError(
        "policy demanded " + std::to_string(decision.power_units) +
        " units with a budget of " + std::to_string(budget));
  }
}

}  // namespace

Simulation::Simulation(const ScenarioConfig& config, std::uint64_t seed)
    : config_(&config), env_rng_(seed, "environment"), state_(initial_state(config)) {}

SlotTrace Simulation::step(Policy& policy) {
  const ScenarioConfig& config = *config_;
  const SystemState s = state_;

  const ControlDecision decision = policy.select(s);
  check_decision(config, s, decision);

  const int green = sample_green(config, s.env_idx, env_rng_);
  const CostBreakdown cost = realized_cost(config, s, decision.power_units, green);

  const ExogenousState exo{s.workload_idx, s.env_idx, s.congestion_idx};
  const ExogenousState exo_next = step_exogenous(config, exo, env_rng_);
  const int battery_next = battery_transition(config, s, decision.power_units, green);

  SystemState next;
  next.workload_idx = exo_next.workload_idx;
  next.env_idx = exo_next.env_idx;
  next.congestion_idx = exo_next.congestion_idx;
  next.battery = battery_next;

  policy.observe(s, decision, green, cost, next);

  SlotTrace slot;
  slot.t = slot_;
  slot.arrival = config.workload_levels[s.workload_idx];
  slot.env_idx = s.env_idx;
  slot.congestion = config.congestion_levels[s.congestion_idx];
  slot.battery = s.battery;
  slot.power_units = decision.power_units;
  slot.servers = decision.servers;
  slot.local_rate = decision.local_rate;
  slot.offload_rate = decision.offload_rate;
  slot.green_units = green;
  slot.cost = cost;
  slot.battery_next = battery_next;

  state_ = next;
  ++slot_;
  return slot;
}

RunResult run(const ScenarioConfig& config, Policy& policy, int slots,
              std::uint64_t seed) {
  if (slots < 1) throw ConfigError("a run needs at least one slot");
  Simulation sim(config, seed);
  RunResult result;
  result.trace.reserve(slots);
  for (int t = 0; t < slots; ++t) {
    result.trace.push_back(sim.step(policy));
  }
  result.metrics = compute_metrics(config, result.trace);
  return result;
}

RunMetrics compute_metrics(const ScenarioConfig& config,
                           std::span<const SlotTrace> trace) {
  RunMetrics metrics;
  metrics.running_average.reserve(trace.size());
  metrics.battery_histogram.assign(config.battery_capacity_units + 1, 0.0);

  double total = 0.0;
  double delay = 0.0, depreciation = 0.0, backup = 0.0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const SlotTrace& slot = trace[i];
    total += slot.cost.total;
    delay += slot.cost.delay();
    depreciation += slot.cost.depreciation;
    backup += slot.cost.backup_cost;
    metrics.running_average.push_back(total / static_cast<double>(i + 1));
    metrics.battery_histogram[slot.battery] += 1.0;
  }
  if (!trace.empty()) {
    metrics.final_time_average_cost = metrics.running_average.back();
    for (double& bin : metrics.battery_histogram) {
      bin /= static_cast<double>(trace.size());
    }
  }
  if (total > 0.0) {
    metrics.delay_fraction = delay / total;
    metrics.depreciation_fraction = depreciation / total;
    metrics.backup_fraction = backup / total;
  }
  return metrics;
}

std::vector<ConvergencePoint> convergence_curve(const ScenarioConfig& config,
                                                Policy& learner,
                                                const ValueTable& optimal,
                                                std::span<const int> checkpoints,
                                                std::uint64_t seed) {
  const StateSpace space(config);
  if (!(space == optimal.space) || optimal.values.size() != space.size()) {
    throw ConfigError("optimal value table does not match the scenario");
  }
  if (learner.value_estimates().size() != optimal.values.size()) {
    throw ConfigError("learner does not expose value estimates for this scenario");
  }
  double scale = 0.0;
  for (double v : optimal.values) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) throw ConfigError("optimal value table is identically zero");

  std::vector<int> sorted(checkpoints.begin(), checkpoints.end());
  std::sort(sorted.begin(), sorted.end());
  if (!sorted.empty() && sorted.front() < 0) {
    throw ConfigError("checkpoints must be non-negative");
  }

  const auto error_now = [&] {
    const auto estimates = learner.value_estimates();
    double sup = 0.0;
    for (std::size_t i = 0; i < estimates.size(); ++i) {
      sup = std::max(sup, std::abs(estimates[i] - optimal.values[i]));
    }
    return sup / scale;
  };

  std::vector<ConvergencePoint> curve;
  curve.reserve(sorted.size());
  Simulation sim(config, seed);
  std::size_t next_checkpoint = 0;
  const int horizon = sorted.empty() ? 0 : sorted.back();
  for (int t = 0; t <= horizon; ++t) {
    while (next_checkpoint < sorted.size() && sorted[next_checkpoint] == t) {
      curve.push_back({t, error_now()});
      ++next_checkpoint;
    }
    if (t < horizon) sim.step(learner);
  }
  return curve;
}

// ---------------------------------------------------------------------------
// CSV artifacts

namespace {

constexpr std::string_view kTraceHeader =
    "t,lambda,e,h,b,a,m,mu,nu,g,c_wi,c_lo,c_off,c_bak,c_batt,total,b_next";

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t begin = 0;
  while (true) {
    const std::size_t comma = line.find(',', begin);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(begin));
      break;
    }
    fields.push_back(line.substr(begin, comma - begin));
    begin = comma + 1;
  }
  return fields;
}

}  // namespace

void write_trace_csv(std::ostream& out, std::span<const SlotTrace> trace) {
  out << kTraceHeader << '\n';
  for (const SlotTrace& s : trace) {
    out << s.t << ',' << format_double(s.arrival) << ',' << s.env_idx << ','
        << format_double(s.congestion) << ',' << s.battery << ','
        << s.power_units << ',' << s.servers << ',' << format_double(s.local_rate)
        << ',' << format_double(s.offload_rate) << ',' << s.green_units << ','
        << format_double(s.cost.wireless_delay) << ','
        << format_double(s.cost.local_delay) << ','
        << format_double(s.cost.offload_delay) << ','
        << format_double(s.cost.backup_cost) << ','
        << format_double(s.cost.depreciation) << ','
        << format_double(s.cost.total) << ',' << s.battery_next << '\n';
  }
}

std::vector<SlotTrace> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) {
    throw NumericError("trace file: unexpected header");
  }
  std::vector<SlotTrace> trace;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 17) {
      throw NumericError("trace file: expected 17 columns, got " +
                         std::to_string(fields.size()));
    }
    SlotTrace s;
    s.t = static_cast<int>(parse_int(fields[0]));
    s.arrival = parse_double(fields[1]);
    s.env_idx = static_cast<int>(parse_int(fields[2]));
    s.congestion = parse_double(fields[3]);
    s.battery = static_cast<int>(parse_int(fields[4]));
    s.power_units = static_cast<int>(parse_int(fields[5]));
    s.servers = static_cast<int>(parse_int(fields[6]));
    s.local_rate = parse_double(fields[7]);
    s.offload_rate = parse_double(fields[8]);
    s.green_units = static_cast<int>(parse_int(fields[9]));
    s.cost.wireless_delay = parse_double(fields[10]);
    s.cost.local_delay = parse_double(fields[11]);
    s.cost.offload_delay = parse_double(fields[12]);
    s.cost.backup_cost = parse_double(fields[13]);
    s.cost.depreciation = parse_double(fields[14]);
    s.cost.total = parse_double(fields[15]);
    s.battery_next = static_cast<int>(parse_int(fields[16]));
    trace.push_back(s);
  }
  return trace;
}

void write_value_csv(std::ostream& out, const ScenarioConfig& config,
                     const ValueTable& table) {
  out << "lambda,e,h,b,value\n";
  for (std::size_t i = 0; i < table.values.size(); ++i) {
    const SystemState s = table.space.state(i);
    out << format_double(config.workload_levels[s.workload_idx]) << ','
        << s.env_idx << ',' << format_double(config.congestion_levels[s.congestion_idx])
        << ',' << s.battery << ',' << format_double(table.values[i]) << '\n';
  }
}

void write_policy_csv(std::ostream& out, const ScenarioConfig& config,
                      const PolicyTable& policy) {
  out << "lambda,e,h,b,action\n";
  for (std::size_t i = 0; i < policy.entries.size(); ++i) {
    const SystemState s = policy.space.state(i);
    out << format_double(config.workload_levels[s.workload_idx]) << ','
        << s.env_idx << ',' << format_double(config.congestion_levels[s.congestion_idx])
        << ',' << s.battery << ',' << policy.entries[i].power_units << '\n';
  }
}

// ---------------------------------------------------------------------------
// Policy maps

std::vector<DemandSlicePoint> demand_slice(const PolicyTable& policy,
                                           int workload_idx, int env_idx,
                                           int congestion_idx) {
  std::vector<DemandSlicePoint> slice;
  slice.reserve(policy.space.n_battery);
  for (int b = 0; b < policy.space.n_battery; ++b) {
    const std::size_t i = policy.space.index(workload_idx, env_idx, congestion_idx, b);
    slice.push_back({b, policy.entries[i].power_units});
  }
  return slice;
}

std::vector<DemandSlicePoint> demand_slice(const ScenarioConfig& config,
                                           Policy& policy, int workload_idx,
                                           int env_idx, int congestion_idx) {
  std::vector<DemandSlicePoint> slice;
  slice.reserve(config.battery_capacity_units + 1);
  SystemState s{workload_idx, env_idx, congestion_idx, 0};
  for (int b = 0; b <= config.battery_capacity_units; ++b) {
    s.battery = b;
    slice.push_back({b, policy.select(s).power_units});
  }
  return slice;
}

std::vector<OffloadSlicePoint> offload_slice(const ScenarioConfig& config,
                                             int servers) {
  if (servers < 0 || servers > config.max_servers) {
    throw ConfigError("offload slice: server count out of range");
  }
  const DelayTable delay(config);
  std::vector<OffloadSlicePoint> slice;
  slice.reserve(config.workload_levels.size() * config.congestion_levels.size());
  for (int li = 0; li < config.workload_count(); ++li) {
    for (int hi = 0; hi < config.congestion_count(); ++hi) {
      slice.push_back({config.workload_levels[li], config.congestion_levels[hi],
                       delay.at(li, hi, servers).local_rate});
    }
  }
  return slice;
}

void write_demand_slice_csv(std::ostream& out, const ScenarioConfig& /*config*/,
                            std::span<const DemandSlicePoint> slice) {
  out << "b,action\n";
  for (const auto& point : slice) {
    out << point.battery << ',' << point.power_units << '\n';
  }
}

void write_offload_slice_csv(std::ostream& out,
                             std::span<const OffloadSlicePoint> slice) {
  out << "lambda,h,mu\n";
  for (const auto& point : slice) {
    out << format_double(point.arrival) << ',' << format_double(point.congestion)
        << ',' << format_double(point.local_rate) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Comparison driver

ComparisonReport compare_policies(const ScenarioConfig& config,
                                  std::span<const std::string> selectors,
                                  int slots,
                                  std::span<const std::uint64_t> seeds,
                                  bool myopic_max_spend) {
  if (selectors.empty()) throw ConfigError("compare: no policies given");
  if (seeds.empty()) throw ConfigError("compare: no seeds given");

  struct RunStats {
    double final_cost;
    double delay_fraction, depreciation_fraction, backup_fraction;
    std::vector<double> histogram;
  };

  ComparisonReport report;
  report.slots = slots;
  report.seeds.assign(seeds.begin(), seeds.end());

  for (const std::string& selector : selectors) {
    std::vector<std::future<RunStats>> futures;
    futures.reserve(seeds.size());
    for (std::uint64_t seed : seeds) {
      futures.push_back(std::async(std::launch::async, [&, seed] {
        auto policy = make_policy(config, selector, seed, myopic_max_spend);
        const RunResult result = run(config, *policy, slots, seed);
        return RunStats{result.metrics.final_time_average_cost,
                        result.metrics.delay_fraction,
                        result.metrics.depreciation_fraction,
                        result.metrics.backup_fraction,
                        result.metrics.battery_histogram};
      }));
    }

    PolicySummary summary;
    summary.selector = selector;
    summary.mean_battery_histogram.assign(config.battery_capacity_units + 1, 0.0);
    for (auto& future : futures) {
      const RunStats stats = future.get();
      summary.final_costs.push_back(stats.final_cost);
      summary.mean_final_cost += stats.final_cost;
      summary.mean_delay_fraction += stats.delay_fraction;
      summary.mean_depreciation_fraction += stats.depreciation_fraction;
      summary.mean_backup_fraction += stats.backup_fraction;
      for (std::size_t b = 0; b < stats.histogram.size(); ++b) {
        summary.mean_battery_histogram[b] += stats.histogram[b];
      }
    }
    const double n = static_cast<double>(seeds.size());
    summary.mean_final_cost /= n;
    summary.mean_delay_fraction /= n;
    summary.mean_depreciation_fraction /= n;
    summary.mean_backup_fraction /= n;
    for (double& bin : summary.mean_battery_histogram) bin /= n;
    double variance = 0.0;
    for (double cost : summary.final_costs) {
      variance += (cost - summary.mean_final_cost) * (cost - summary.mean_final_cost);
    }
    summary.stddev_final_cost = std::sqrt(variance / n);
    report.policies.push_back(std::move(summary));
  }
  return report;
}

}  // namespace greenedge
