#pragma once

#include <vector>

#include "greenedge/config.hpp"

namespace greenedge {

/// Observable system state at the start of a slot: exogenous indices plus
/// the battery level in energy units.
struct SystemState {
  int workload_idx = 0;
  int env_idx = 0;
  int congestion_idx = 0;
  int battery = 0;

  bool operator==(const SystemState&) const = default;
};

/// Deterministic intermediate state after the power-demand decision but
/// before the green-energy arrival. Exogenous indices are unchanged; only
/// the (virtual) battery level moves.
struct PostDecisionState {
  int workload_idx = 0;
  int env_idx = 0;
  int congestion_idx = 0;
  int post_battery = 0;
};

/// A slot decision: the computing power demand in energy units together
/// with the server count and workload split it induces.
struct ControlDecision {
  int power_units = 0;       // demand handed to the servers this slot
  int servers = 0;
  double local_rate = 0.0;   // workload processed at the edge, units/sec
  double offload_rate = 0.0; // remainder sent to the cloud
};

/// Result of the per-slot delay minimization for a given power demand.
struct InnerSolution {
  int servers = 0;
  double local_rate = 0.0;
  double wireless_delay = 0.0;
  double local_delay = 0.0;
  double offload_delay = 0.0;

  double delay() const { return wireless_delay + local_delay + offload_delay; }
};

/// Realized per-slot cost, split into its components.
struct CostBreakdown {
  double wireless_delay = 0.0;
  double local_delay = 0.0;
  double offload_delay = 0.0;
  double backup_cost = 0.0;
  double depreciation = 0.0;
  double utilization = 0.0;  // wireless load factor, arrival/capacity
  double total = 0.0;

  double delay() const { return wireless_delay + local_delay + offload_delay; }
};

/// Aggregate wireless access and transmission delay for arrival rate
/// `arrival` on a link of capacity `capacity` (both units/sec).
/// Throws ConfigError once the load factor reaches one.
double wireless_delay(double arrival, double capacity);

/// Queueing delay cost of processing `local_rate` units/sec on `servers`
/// pooled servers of rate `service_rate` each: local/(total - local).
/// Zero when nothing is processed locally.
double local_delay(int servers, double local_rate, double service_rate);

/// Round-trip delay cost of offloading: (arrival - local) * congestion.
double offload_delay(double arrival, double local_rate, double congestion);

/// Operation power demand for the slot in energy units:
/// static draw plus the (rounded) workload-dependent term.
int op_power(const ScenarioConfig& config, double arrival);

/// Computing power demand of `servers` active servers. Load-independent in
/// the default model; `local_rate` is part of the contract for convex
/// load-dependent extensions.
int com_power(const ScenarioConfig& config, int servers, double local_rate = 0.0);

/// True when the battery cannot cover basic operation and the backup
/// supply must run this slot.
bool backup_regime(const ScenarioConfig& config, const SystemState& state);

/// All feasible power demands for the state, ascending. These are the
/// multiples of the per-server draw that fit under the conservative budget
/// max(battery - operation power, 0); zero is always included.
std::vector<int> feasible_actions(const ScenarioConfig& config,
                                  const SystemState& state);

/// Delay-optimal server count and workload split for a fixed power demand.
///
/// Under the load-independent computing-power model the demand pins the
/// server count, so only the split remains: the objective
/// local/(capacity - local) + (arrival - local) * congestion is strictly
/// convex in the local rate, with interior stationary point
/// capacity - sqrt(capacity / congestion) clamped to [0, min(arrival,
/// capacity)]. A demand of zero means full offload.
/// Throws InfeasibleDecisionError when the demand is not feasible.
InnerSolution inner_optimize(const ScenarioConfig& config,
                             const SystemState& state, int power_units);

/// Realized cost of one slot given the green-energy arrival.
/// In the backup regime everything is offloaded and the backup supply is
/// charged for the operation power; otherwise the cost is the optimized
/// delay plus depreciation on the discharged demand.
CostBreakdown realized_cost(const ScenarioConfig& config,
                            const SystemState& state, int power_units,
                            int green_units);

/// Battery level at the start of the next slot.
int battery_transition(const ScenarioConfig& config, const SystemState& state,
                       int power_units, int green_units);

/// Post-decision state reached by applying the power demand before the
/// green-energy arrival. Deterministic.
PostDecisionState pds(const ScenarioConfig& config, const SystemState& state,
                      int power_units);

/// Precomputed inner-optimization solutions for every (workload,
/// congestion, server count) triple. The solutions do not depend on the
/// battery or environment state, so the table is small and shared by the
/// solver, the learners and the run harness.
class DelayTable {
 public:
  explicit DelayTable(const ScenarioConfig& config);

  const InnerSolution& at(int workload_idx, int congestion_idx,
                          int servers) const;

  /// Optimized delay cost for the triple (sum of the three components).
  double delay(int workload_idx, int congestion_idx, int servers) const {
    return at(workload_idx, congestion_idx, servers).delay();
  }

  /// Full-offload delay plus the backup-supply cost, the slot cost of a
  /// state whose battery cannot cover basic operation.
  double backup_cost(int workload_idx, int congestion_idx) const;

  int server_levels() const { return servers_; }

 private:
  int congestion_count_;
  int servers_;  // max_servers + 1 entries per (workload, congestion)
  std::vector<InnerSolution> solutions_;
  std::vector<double> backup_costs_;
};

}  // namespace greenedge
