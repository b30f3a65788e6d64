#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "greenedge/dynamics.hpp"
#include "greenedge/model.hpp"

namespace greenedge {

/// Row-major enumeration of the full state space
/// (workload, environment, congestion, battery).
struct StateSpace {
  int n_workload = 0;
  int n_env = 0;
  int n_congestion = 0;
  int n_battery = 0;  // battery capacity + 1

  StateSpace() = default;
  explicit StateSpace(const ScenarioConfig& config);

  std::size_t size() const {
    return static_cast<std::size_t>(n_workload) * n_env * n_congestion * n_battery;
  }
  std::size_t triple_count() const {
    return static_cast<std::size_t>(n_workload) * n_env * n_congestion;
  }
  std::size_t triple_index(int workload_idx, int env_idx, int congestion_idx) const {
    return (static_cast<std::size_t>(workload_idx) * n_env + env_idx) * n_congestion +
           congestion_idx;
  }
  std::size_t index(int workload_idx, int env_idx, int congestion_idx,
                    int battery) const {
    return triple_index(workload_idx, env_idx, congestion_idx) * n_battery + battery;
  }
  std::size_t index(const SystemState& s) const {
    return index(s.workload_idx, s.env_idx, s.congestion_idx, s.battery);
  }
  SystemState state(std::size_t flat) const;

  bool operator==(const StateSpace&) const = default;
};

/// Real-valued table over the full state space (used for both the normal
/// and the post-decision value function; the post-decision battery axis has
/// the same range).
struct ValueTable {
  StateSpace space;
  std::vector<double> values;
  int iterations = 0;
  double final_delta = 0.0;

  double at(const SystemState& s) const { return values[space.index(s)]; }
};

struct PolicyEntry {
  int power_units = 0;
  int servers = 0;
  double local_rate = 0.0;
};

/// Optimal power demand (with its induced server count and split) per state.
struct PolicyTable {
  StateSpace space;
  std::vector<PolicyEntry> entries;

  const PolicyEntry& at(const SystemState& s) const {
    return entries[space.index(s)];
  }
};

struct OracleSolution {
  ValueTable values;   // optimal normal value function
  PolicyTable policy;  // minimizing power demand per state
};

/// Expectation over one slot of exogenous dynamics: maps a normal value
/// table C to the post-decision table
///   V(w, e, c, pb) = E[ C(w', e', c', min(pb + g, B)) ]
/// with (w', e', c') drawn from the transition matrices and g from the
/// green-energy pmf conditioned on e. Factored into one tensor contraction
/// per axis, so a full application is cheap enough to run every sweep.
class TransitionOperator {
 public:
  explicit TransitionOperator(const ScenarioConfig& config);

  const StateSpace& space() const { return space_; }

  /// pds_values must have space().size() entries.
  void apply(std::span<const double> normal_values,
             std::span<double> pds_values) const;

  std::vector<double> apply(std::span<const double> normal_values) const;

  const GreenDistribution& green(int env_idx) const { return greens_[env_idx]; }

 private:
  StateSpace space_;
  Matrix workload_rows_, env_rows_, congestion_rows_;
  std::vector<GreenDistribution> greens_;
  mutable std::vector<double> scratch_a_, scratch_b_;
};

/// Expected one-slot cost c(s, a) split into a deterministic delay part and
/// the expected battery-deficit part, both precomputed.
class ExpectedCostTable {
 public:
  explicit ExpectedCostTable(const ScenarioConfig& config);

  /// Expected cost of running `servers` servers in a non-backup state.
  double cost(int workload_idx, int env_idx, int congestion_idx,
              int servers) const;

  /// Slot cost of a backup-regime state (only zero demand is feasible).
  double backup_cost(int workload_idx, int congestion_idx) const {
    return delay_.backup_cost(workload_idx, congestion_idx);
  }

  /// Expected discharge deficit E[max(demand - green, 0)] for the demand
  /// implied by `servers` (plus operation power when so configured).
  double expected_deficit(int workload_idx, int env_idx, int servers) const;

  const DelayTable& delay_table() const { return delay_; }

 private:
  const ScenarioConfig* config_;
  DelayTable delay_;
  std::vector<int> op_power_;              // per workload level
  std::vector<std::vector<double>> deficit_by_demand_;  // [env][demand units]
};

/// Solve the discounted Bellman equations by value iteration over the
/// enumerated state space. Stops once the sup-norm sweep update falls below
/// tol * (1 - discount) / (2 * discount), which bounds the distance to the
/// fixed point by tol / 2. Ties in the minimization go to the smallest
/// power demand. Throws NumericError for non-finite sweeps or when the
/// state space exceeds `state_cap`.
OracleSolution value_iteration(const ScenarioConfig& config, double tol,
                               int max_iterations = 1000000,
                               std::size_t state_cap = 4000000);

/// Post-decision value function induced by a normal value table.
ValueTable pds_value(const ScenarioConfig& config, const ValueTable& normal);

/// Sup-norm distance between the table and one Bellman-operator application.
double bellman_residual(const ScenarioConfig& config, const ValueTable& table);

struct PolicyMonotonicityViolation {
  int workload_idx, env_idx, congestion_idx;
  int battery;  // demand decreases from `battery` to `battery + 1`
  int action_low, action_high;
};

/// All adjacent battery pairs where the policy's power demand decreases.
/// Empty when the demand is non-decreasing in the battery level everywhere.
std::vector<PolicyMonotonicityViolation> check_monotone_policy(
    const PolicyTable& policy);

struct ValueShapeViolation {
  int workload_idx, env_idx, congestion_idx;
  int battery;
  double magnitude;
};

struct ValueShapeReport {
  std::vector<ValueShapeViolation> monotonicity;  // value increased with battery
  std::vector<ValueShapeViolation> convexity;     // negative second difference
  std::size_t monotonicity_pairs = 0;
  std::size_t convexity_triples = 0;
};

/// Check that the table is non-increasing and midpoint-convex along the
/// battery axis for every exogenous triple, with 1e-9 slack.
ValueShapeReport check_value_shape(const ValueTable& table);

}  // namespace greenedge
