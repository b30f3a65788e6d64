#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "greenedge/learners.hpp"
#include "greenedge/model.hpp"
#include "greenedge/oracle.hpp"

namespace greenedge {

/// One simulated slot, sufficient to replay costs and battery flow.
struct SlotTrace {
  int t = 0;
  double arrival = 0.0;      // lambda
  int env_idx = 0;           // e
  double congestion = 0.0;   // h
  int battery = 0;           // b at the start of the slot
  int power_units = 0;       // a
  int servers = 0;           // m
  double local_rate = 0.0;   // mu
  double offload_rate = 0.0; // nu
  int green_units = 0;       // g
  CostBreakdown cost;
  int battery_next = 0;

  bool backup() const { return cost.backup_cost > 0.0; }
};

struct ConvergencePoint {
  int t = 0;
  double relative_error = 0.0;
};

/// Run statistics in the shape the reports use: undiscounted running mean
/// of the realized slot cost, cost composition, and the distribution of
/// start-of-slot battery levels.
struct RunMetrics {
  double final_time_average_cost = 0.0;
  std::vector<double> running_average;  // one entry per slot
  double delay_fraction = 0.0;
  double depreciation_fraction = 0.0;
  double backup_fraction = 0.0;
  std::vector<double> battery_histogram;  // capacity + 1 bins, sums to 1
  std::vector<ConvergencePoint> value_error_curve;  // filled by convergence runs
};

struct RunResult {
  std::vector<SlotTrace> trace;
  RunMetrics metrics;
};

/// Drives environment and policy for one slot at a time. The environment
/// draws (green arrival, then the three exogenous chains) come from a
/// stream named "environment" derived from the seed; policies draw from
/// their own streams, so the environment realization is identical across
/// policies run with the same seed.
class Simulation {
 public:
  Simulation(const ScenarioConfig& config, std::uint64_t seed);

  const SystemState& state() const { return state_; }
  int slot() const { return slot_; }

  /// Advance one slot with the policy's decision; throws
  /// InfeasibleDecisionError if the policy violates the budget.
  SlotTrace step(Policy& policy);

 private:
  const ScenarioConfig* config_;
  SplitRng env_rng_;
  SystemState state_;
  int slot_ = 0;
};

/// Simulate `slots` slots and collect the trace and metrics.
/// Deterministic given (config, policy, seed).
RunResult run(const ScenarioConfig& config, Policy& policy, int slots,
              std::uint64_t seed);

/// Metrics recomputed from a trace; run() uses this same path, so metrics
/// rebuilt from a written trace file match exactly.
RunMetrics compute_metrics(const ScenarioConfig& config,
                           std::span<const SlotTrace> trace);

/// Relative sup-norm error of the learner's value estimates against a
/// solved table, sampled at the given checkpoints (ascending slot counts;
/// checkpoint 0 is measured before any learning).
std::vector<ConvergencePoint> convergence_curve(const ScenarioConfig& config,
                                                Policy& learner,
                                                const ValueTable& optimal,
                                                std::span<const int> checkpoints,
                                                std::uint64_t seed);

// --- trace and table artifacts ---------------------------------------------

/// Columns: t,lambda,e,h,b,a,m,mu,nu,g,c_wi,c_lo,c_off,c_bak,c_batt,total,b_next
void write_trace_csv(std::ostream& out, std::span<const SlotTrace> trace);
std::vector<SlotTrace> read_trace_csv(std::istream& in);

void write_value_csv(std::ostream& out, const ScenarioConfig& config,
                     const ValueTable& table);
void write_policy_csv(std::ostream& out, const ScenarioConfig& config,
                      const PolicyTable& policy);

// --- policy maps ------------------------------------------------------------

struct DemandSlicePoint {
  int battery = 0;
  int power_units = 0;
};

/// Demand along the battery axis for one fixed exogenous triple.
std::vector<DemandSlicePoint> demand_slice(const PolicyTable& policy,
                                           int workload_idx, int env_idx,
                                           int congestion_idx);

/// Same slice evaluated through a live policy's selection rule.
std::vector<DemandSlicePoint> demand_slice(const ScenarioConfig& config,
                                           Policy& policy, int workload_idx,
                                           int env_idx, int congestion_idx);

struct OffloadSlicePoint {
  double arrival = 0.0;
  double congestion = 0.0;
  double local_rate = 0.0;
};

/// Delay-optimal local rate over the (workload, congestion) grid for a
/// fixed server count.
std::vector<OffloadSlicePoint> offload_slice(const ScenarioConfig& config,
                                             int servers);

void write_demand_slice_csv(std::ostream& out, const ScenarioConfig& config,
                            std::span<const DemandSlicePoint> slice);
void write_offload_slice_csv(std::ostream& out,
                             std::span<const OffloadSlicePoint> slice);

// --- multi-run comparison ---------------------------------------------------

struct PolicySummary {
  std::string selector;
  std::vector<double> final_costs;  // one per seed
  double mean_final_cost = 0.0;
  double stddev_final_cost = 0.0;
  double mean_delay_fraction = 0.0;
  double mean_depreciation_fraction = 0.0;
  double mean_backup_fraction = 0.0;
  std::vector<double> mean_battery_histogram;
};

struct ComparisonReport {
  int slots = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<PolicySummary> policies;
};

/// Run every (policy, seed) pair — pairs execute in parallel, each with its
/// own rng and tables — and aggregate per-policy statistics.
ComparisonReport compare_policies(const ScenarioConfig& config,
                                  std::span<const std::string> selectors,
                                  int slots,
                                  std::span<const std::uint64_t> seeds,
                                  bool myopic_max_spend = false);

}  // namespace greenedge
