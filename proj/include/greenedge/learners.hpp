#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "greenedge/model.hpp"
#include "greenedge/oracle.hpp"
#include "greenedge/rng.hpp"

namespace greenedge {

/// Online decision-making interface driven by the run harness: select a
/// decision for the observed state, then observe the realized slot.
/// A policy instance is single-writer; independent runs use independent
/// instances.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual ControlDecision select(const SystemState& state) = 0;

  virtual void observe(const SystemState& /*state*/,
                       const ControlDecision& /*decision*/, int /*green_units*/,
                       const CostBreakdown& /*cost*/,
                       const SystemState& /*next_state*/) {}

  /// Flattened post-decision value estimates in StateSpace order, when the
  /// policy learns them (empty otherwise). Used for convergence tracking.
  virtual std::span<const double> value_estimates() const { return {}; }

  virtual std::string_view name() const = 0;
};

/// Post-decision-state learner.
///
/// The delay part of the slot cost and the battery dynamics are known
/// deterministically, so the learner estimates only what is stochastic:
/// the per-environment expected discharge deficit and the post-decision
/// value function. Selection is greedy over
///   cost_estimate(s, a) + discount * value_estimate(post_state(s, a)),
/// and each observed slot triggers three batch updates:
///   1. deficit estimate for the slot's environment state, at every demand
///      level (the innovation depends only on the demand and the arrival);
///   2. refreshed normal values for the next slot's exogenous triple at
///      every battery level;
///   3. value estimates for the current triple at every post-decision
///      battery level, shifted by the realized green arrival.
/// Learning rates are visit-count powers, 1/n^exponent.
class PdsLearner : public Policy {
 public:
  explicit PdsLearner(const ScenarioConfig& config);

  ControlDecision select(const SystemState& state) override;
  void observe(const SystemState& state, const ControlDecision& decision,
               int green_units, const CostBreakdown& cost,
               const SystemState& next_state) override;

  std::span<const double> value_estimates() const override { return pds_values_; }
  std::string_view name() const override { return "pds"; }

  const StateSpace& space() const { return space_; }

  /// Estimated slot cost of running `servers` servers in a non-backup
  /// state: known delay plus depreciation on the estimated deficit.
  double cost_estimate(const SystemState& state, int servers) const;

  /// Deficit estimate table entry (environment x demand level).
  double deficit_estimate(int env_idx, int servers) const;

  /// Greedy demand for every state, for comparison against a solved policy.
  PolicyTable greedy_policy() const;

 private:
  ControlDecision greedy_decision(const SystemState& state) const;

  const ScenarioConfig* config_;
  StateSpace space_;
  DelayTable delay_;
  std::vector<int> op_power_;            // per workload level
  std::vector<double> deficit_;          // [env][servers]
  std::vector<double> pds_values_;       // StateSpace order
  std::vector<double> normal_scratch_;   // per-update battery column
  std::vector<std::uint64_t> env_visits_;
  std::vector<std::uint64_t> triple_visits_;
};

/// Tabular Q-learning over the same demand grid, epsilon-greedy over the
/// feasible set with epsilon_t = max(eps_min, t^-x) and visit-count rates.
class QLearner : public Policy {
 public:
  QLearner(const ScenarioConfig& config, std::uint64_t seed);

  ControlDecision select(const SystemState& state) override;
  void observe(const SystemState& state, const ControlDecision& decision,
               int green_units, const CostBreakdown& cost,
               const SystemState& next_state) override;

  std::string_view name() const override { return "qlearning"; }

  double q_value(const SystemState& state, int servers) const;

  /// min over feasible demands of Q(s, a), one entry per state.
  std::vector<double> normal_value_estimates() const;

 private:
  double min_feasible_q(const SystemState& state) const;

  const ScenarioConfig* config_;
  StateSpace space_;
  DelayTable delay_;
  std::vector<double> q_;                 // [state][servers]
  std::vector<std::uint32_t> visits_;     // [state][servers]
  std::uint64_t slots_seen_ = 0;
  SplitRng rng_;
};

/// Minimizes the current-slot cost estimate only (shares the deficit
/// updates with the PDS learner). The max-spend variant instead commits
/// the whole battery budget each slot.
class MyopicPolicy : public Policy {
 public:
  explicit MyopicPolicy(const ScenarioConfig& config, bool max_spend = false);

  ControlDecision select(const SystemState& state) override;
  void observe(const SystemState& state, const ControlDecision& decision,
               int green_units, const CostBreakdown& cost,
               const SystemState& next_state) override;

  std::string_view name() const override {
    return max_spend_ ? "myopic-maxspend" : "myopic";
  }

 private:
  const ScenarioConfig* config_;
  DelayTable delay_;
  std::vector<double> deficit_;  // [env][servers]
  std::vector<std::uint64_t> env_visits_;
  bool max_spend_;
};

/// Uses a fixed computing power level whenever the budget allows, rounded
/// down to the demand grid.
class FixedPolicy : public Policy {
 public:
  FixedPolicy(const ScenarioConfig& config, int level_units);

  ControlDecision select(const SystemState& state) override;
  std::string_view name() const override { return name_; }

  int level_units() const { return level_units_; }

 private:
  const ScenarioConfig* config_;
  DelayTable delay_;
  int level_units_;
  std::string name_;
};

/// Reference implementation of the slot-cost estimate as one literal entry
/// per (state, demand) pair, updated with the same batch recursion. Kept to
/// cross-check the factored representation used by the learners.
class LiteralCostTable {
 public:
  explicit LiteralCostTable(const ScenarioConfig& config);

  /// Apply one batch update for a slot observed in environment `env_idx`
  /// with realized green arrival `green_units`.
  void update(int env_idx, int green_units);

  double at(const SystemState& state, int servers) const;

  const StateSpace& space() const { return space_; }

 private:
  const ScenarioConfig* config_;
  StateSpace space_;
  DelayTable delay_;
  std::vector<double> costs_;  // [state][servers]
  std::vector<std::uint64_t> env_visits_;
};

/// Build a policy from a CLI selector: "pds", "qlearning", "myopic",
/// "fixed:<kW>" (or "fixed" for the configured default level).
std::unique_ptr<Policy> make_policy(const ScenarioConfig& config,
                                    std::string_view selector,
                                    std::uint64_t seed,
                                    bool myopic_max_spend = false);

}  // namespace greenedge
