#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace greenedge {

using Matrix = std::vector<std::vector<double>>;

/// Learning-rate and exploration schedules shared by the online policies.
struct LearnParams {
  double cost_rate_exponent = 0.7;   // slot-cost estimate rate 1/n^x
  double value_rate_exponent = 0.7;  // value estimate rate 1/n^x
  double q_rate_exponent = 0.7;      // Q-table rate 1/n^x
  double q_epsilon_min = 0.05;
  double q_epsilon_exponent = 0.5;   // epsilon_t = max(min, t^-x)
  double fixed_power_kw = 1.0;       // default level for the fixed policy
};

/// Initial conditions for a simulated run. Negative values mean "use the
/// default": full battery, mid-range exogenous indices.
struct InitParams {
  int battery_units = -1;
  int workload_idx = -1;
  int env_idx = -1;
  int congestion_idx = -1;
};

/// Full description of one edge-system scenario: physical model constants,
/// exogenous state spaces and their transition matrices, green-energy
/// statistics, and learning hyper-parameters.
///
/// All energy quantities are integer multiples of `energy_unit_wh` per slot
/// (12.5 Wh by default), so the battery state is exact: a 300 W static draw
/// over a 15-minute slot is 6 units, one 150 W server is 3 units, and a
/// 2 kWh battery holds 160 units.
///
/// A default-constructed config is the reference scenario; every field can
/// be overridden from a config file (see load_config).
struct ScenarioConfig {
  std::vector<double> workload_levels =      // arrival rates, units/sec
      {10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
  std::vector<double> congestion_levels =    // round-trip cost, sec/unit
      {0.020, 0.030, 0.040, 0.050, 0.060};
  std::vector<std::string> env_labels = {"Low", "Medium", "High"};

  int battery_capacity_units = 160;
  double energy_unit_wh = 12.5;
  double slot_hours = 0.25;
  int max_servers = 15;
  int server_power_units = 3;      // per active server per slot
  double service_rate = 20.0;      // units/sec per server
  int static_power_units = 6;      // base-station operation draw per slot
  double dyn_power_coeff = 0.0;    // watts per (unit/sec) of workload
  double wireless_capacity = 120.0;  // aggregate uplink, units/sec
  double depreciation_cost = 0.01;   // per energy unit discharged
  double backup_cost_coeff = 0.15;   // per energy unit of backup supply
  double discount = 0.9;

  std::vector<double> green_mean_watts = {200.0, 400.0, 600.0};
  std::vector<double> green_std_watts = {10.0, 10.0, 10.0};

  // Row-stochastic transition matrices for the exogenous chains. Filled
  // with lazy reflecting walks by the default constructor.
  Matrix transition_workload;
  Matrix transition_env;
  Matrix transition_congestion;

  LearnParams learn;

  // When set, battery depreciation is charged on the whole discharged
  // demand (operation + computing) instead of the computing demand alone.
  bool depreciation_includes_operation = false;

  InitParams init;
  std::uint64_t seed = 1;

  ScenarioConfig();

  int workload_count() const { return static_cast<int>(workload_levels.size()); }
  int env_count() const { return static_cast<int>(env_labels.size()); }
  int congestion_count() const { return static_cast<int>(congestion_levels.size()); }

  /// Energy units (rounded half-up) for an average power over one slot.
  int watts_to_units(double watts) const;

  /// Power-demand grid value for `servers` active servers.
  int action_units(int servers) const { return servers * server_power_units; }

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Parse a flat key=value scenario file ('#' comments, dotted keys,
/// units spelled out in the key names). Unknown keys are rejected; missing
/// keys keep their defaults. The result is validated.
ScenarioConfig load_config(const std::filesystem::path& path);

/// Same grammar, from an in-memory string (used by tests and empty files).
ScenarioConfig parse_config(const std::string& text);

}  // namespace greenedge
