#include <doctest.h>

#include <string>

#include "greenedge/config.hpp"
#include "greenedge/errors.hpp"

using namespace greenedge;

TEST_CASE("defaults encode the reference scenario") {
  ScenarioConfig config;
  config.validate();
  CHECK(config.workload_levels.size() == 10);
  CHECK(config.workload_levels.front() == 10.0);
  CHECK(config.workload_levels.back() == 100.0);
  CHECK(config.congestion_levels.size() == 5);
  CHECK(config.env_labels.size() == 3);
  CHECK(config.battery_capacity_units == 160);
  CHECK(config.static_power_units == 6);
  CHECK(config.server_power_units == 3);
  CHECK(config.max_servers == 15);
  CHECK(config.service_rate == 20.0);
  CHECK(config.wireless_capacity == 120.0);
  CHECK(config.discount == 0.9);
  CHECK(config.depreciation_cost == 0.01);
  CHECK(config.backup_cost_coeff == 0.15);
  CHECK(config.transition_workload.size() == 10);
  CHECK(config.transition_env[1][1] == doctest::Approx(0.7));
  CHECK(config.transition_workload[4][4] == doctest::Approx(0.6));
  // 15-minute slots and 12.5 Wh units make the wattage constants integral
  CHECK(config.watts_to_units(300.0) == 6);
  CHECK(config.watts_to_units(150.0) == 3);
  CHECK(config.watts_to_units(1000.0) == 20);
  CHECK(config.watts_to_units(400.0) == 8);
}

TEST_CASE("empty file yields the default scenario") {
  const ScenarioConfig parsed = parse_config("");
  const ScenarioConfig defaults;
  CHECK(parsed.workload_levels == defaults.workload_levels);
  CHECK(parsed.battery_capacity_units == defaults.battery_capacity_units);
  CHECK(parsed.transition_workload == defaults.transition_workload);
  CHECK(parsed.green_mean_watts == defaults.green_mean_watts);
}

TEST_CASE("capacity can be given in kWh") {
  const ScenarioConfig config = parse_config("battery_capacity_kwh = 2\n");
  CHECK(config.battery_capacity_units == 160);
  CHECK_THROWS_AS(
      parse_config("battery_capacity_kwh = 2\nbattery_capacity_units = 100\n"),
      ConfigError);
}

TEST_CASE("overriding a level list rebuilds its default chain") {
  const ScenarioConfig config =
      parse_config("workload_levels_units_per_sec = 10 40 70 100\n");
  CHECK(config.transition_workload.size() == 4);
  CHECK(config.transition_workload[0][0] == doctest::Approx(0.6));
}

TEST_CASE("explicit matrices are validated with the offending key") {
  const std::string bad =
      "transition_env.rows = 0.5 0.4 0; 0.2 0.6 0.2; 0 0.3 0.7\n";
  CHECK_THROWS_WITH_AS(parse_config(bad),
                       doctest::Contains("transition_env"), ConfigError);

  const std::string wrong_size = "transition_env.rows = 0.5 0.5; 0.5 0.5\n";
  CHECK_THROWS_AS(parse_config(wrong_size), ConfigError);

  const std::string both =
      "transition_env.rows = 1 0 0; 0 1 0; 0 0 1\ntransition_env.stay = 0.5\n";
  CHECK_THROWS_AS(parse_config(both), ConfigError);

  const ScenarioConfig ok = parse_config(
      "transition_env.rows = 0.5 0.5 0; 0.25 0.5 0.25; 0 0.5 0.5\n");
  CHECK(ok.transition_env[1][0] == doctest::Approx(0.25));
}

TEST_CASE("unknown keys are rejected by name") {
  CHECK_THROWS_WITH_AS(parse_config("wireless_capacity = 100\n"),
                       doctest::Contains("wireless_capacity"), ConfigError);
}

TEST_CASE("invariant violations are rejected") {
  CHECK_THROWS_AS(parse_config("discount = 1.0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("discount = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("wireless_capacity_units_per_sec = 90\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config("battery_capacity_units = 4\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("learn.cost_rate_exponent = 0.4\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("learn.cost_rate_exponent = 1.2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("green_mean_watts = 100 200\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("init.battery_units = 500\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("workload_levels_units_per_sec = 10 10 30\n"),
                  ConfigError);
}

TEST_CASE("scalar overrides and comments parse") {
  const std::string text =
      "# scenario overrides\n"
      "discount = 0.85\n"
      "seed = 99\n"
      "depreciation_includes_operation = true\n"
      "learn.fixed_power_kw = 0.4\n"
      "init.battery_units = 20\n"
      "green_std_watts = 5 5 5  # tighter arrivals\n";
  const ScenarioConfig config = parse_config(text);
  CHECK(config.discount == 0.85);
  CHECK(config.seed == 99);
  CHECK(config.depreciation_includes_operation);
  CHECK(config.learn.fixed_power_kw == 0.4);
  CHECK(config.init.battery_units == 20);
  CHECK(config.green_std_watts == std::vector<double>{5, 5, 5});
}

TEST_CASE("syntax errors are loud") {
  CHECK_THROWS_AS(parse_config("discount 0.9\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("discount = zero\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("seed = 1\nseed = 2\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/scenario.cfg"), ConfigError);
}
