#include <doctest.h>

#include <cmath>
#include <sstream>

#include "greenedge/errors.hpp"
#include "greenedge/harness.hpp"
#include "support/scenarios.hpp"

using namespace greenedge;

TEST_CASE("single deterministic slot is fully predictable") {
  ScenarioConfig config = testing::small_scenario();
  config.green_std_watts = {0.0, 0.0, 0.0};
  FixedPolicy policy(config, 0);
  const RunResult result = run(config, policy, 1, 1);
  REQUIRE(result.trace.size() == 1);
  const SlotTrace& slot = result.trace[0];

  // midpoints: arrival 70 units/sec, medium environment, congestion 0.040;
  // full battery of 40, demand 0, deterministic arrival of 8 units
  CHECK(slot.arrival == 70.0);
  CHECK(slot.env_idx == 1);
  CHECK(slot.congestion == 0.040);
  CHECK(slot.battery == 40);
  CHECK(slot.power_units == 0);
  CHECK(slot.green_units == 8);
  CHECK(slot.cost.wireless_delay == doctest::Approx(1.4));
  CHECK(slot.cost.offload_delay == doctest::Approx(2.8));
  CHECK(slot.cost.total == doctest::Approx(4.2));
  CHECK(slot.battery_next == 40);  // 40 - 6 + 8 clipped at capacity
  CHECK(result.metrics.final_time_average_cost == doctest::Approx(4.2));
}

TEST_CASE("identical seeds replay identical traces") {
  const ScenarioConfig config = testing::small_scenario();
  PdsLearner first(config);
  PdsLearner second(config);
  const RunResult a = run(config, first, 400, 17);
  const RunResult b = run(config, second, 400, 17);
  REQUIRE(a.trace.size() == b.trace.size());
  std::ostringstream csv_a, csv_b;
  write_trace_csv(csv_a, a.trace);
  write_trace_csv(csv_b, b.trace);
  CHECK(csv_a.str() == csv_b.str());
  CHECK(a.metrics.final_time_average_cost == b.metrics.final_time_average_cost);
}

TEST_CASE("battery flow accounting holds slot by slot") {
  const ScenarioConfig config = testing::small_scenario();
  MyopicPolicy policy(config);
  const RunResult result = run(config, policy, 2000, 5);
  for (const SlotTrace& slot : result.trace) {
    const int operation = op_power(config, slot.arrival);
    CHECK(slot.battery >= 0);
    CHECK(slot.battery <= config.battery_capacity_units);
    CHECK(slot.backup() == (operation > slot.battery));
    if (slot.backup()) {
      CHECK(slot.power_units == 0);
      CHECK(slot.battery_next ==
            std::min(slot.battery + slot.green_units,
                     config.battery_capacity_units));
    } else {
      const int unclipped =
          slot.battery - operation - slot.power_units + slot.green_units;
      CHECK(slot.battery_next == std::min(unclipped, config.battery_capacity_units));
      if (unclipped <= config.battery_capacity_units) {
        CHECK(slot.battery_next - slot.battery ==
              slot.green_units - operation - slot.power_units);
      }
    }
  }
}

TEST_CASE("metrics rebuilt from the trace file match exactly") {
  const ScenarioConfig config = testing::small_scenario();
  QLearner policy(config, 21);
  const RunResult result = run(config, policy, 500, 21);

  std::ostringstream csv;
  write_trace_csv(csv, result.trace);
  std::istringstream csv_in(csv.str());
  const auto replayed = read_trace_csv(csv_in);
  REQUIRE(replayed.size() == result.trace.size());
  const RunMetrics rebuilt = compute_metrics(config, replayed);

  CHECK(rebuilt.final_time_average_cost == result.metrics.final_time_average_cost);
  CHECK(rebuilt.running_average == result.metrics.running_average);
  CHECK(rebuilt.battery_histogram == result.metrics.battery_histogram);
  CHECK(rebuilt.delay_fraction == result.metrics.delay_fraction);
  CHECK(rebuilt.depreciation_fraction == result.metrics.depreciation_fraction);
  CHECK(rebuilt.backup_fraction == result.metrics.backup_fraction);
}

TEST_CASE("composition fractions and histogram are normalized") {
  const ScenarioConfig config = testing::small_scenario();
  PdsLearner policy(config);
  const RunMetrics metrics = run(config, policy, 1500, 9).metrics;
  CHECK(std::abs(metrics.delay_fraction + metrics.depreciation_fraction +
                 metrics.backup_fraction - 1.0) <= 1e-9);
  double mass = 0.0;
  for (double bin : metrics.battery_histogram) mass += bin;
  CHECK(std::abs(mass - 1.0) <= 1e-9);
}

TEST_CASE("convergence curve starts at one and validates shapes") {
  const ScenarioConfig config = testing::small_scenario();
  const OracleSolution solution = value_iteration(config, 1e-6);
  const ValueTable optimal = pds_value(config, solution.values);

  PdsLearner learner(config);
  const std::vector<int> checkpoints = {0, 50, 100};
  const auto curve = convergence_curve(config, learner, optimal, checkpoints, 2);
  REQUIRE(curve.size() == 3);
  CHECK(curve[0].t == 0);
  CHECK(curve[0].relative_error == 1.0);

  SUBCASE("mismatched scenario is rejected") {
    const ScenarioConfig other;  // full-size scenario
    PdsLearner big(other);
    CHECK_THROWS_AS(
        convergence_curve(other, big, optimal, checkpoints, 2), ConfigError);
  }

  SUBCASE("policies without value estimates are rejected") {
    FixedPolicy fixed(config, 20);
    CHECK_THROWS_AS(
        convergence_curve(config, fixed, optimal, checkpoints, 2), ConfigError);
  }
}

TEST_CASE("demand slice walks the battery axis") {
  ScenarioConfig config = testing::small_scenario();
  const OracleSolution solution = value_iteration(config, 1e-6);
  const auto slice = demand_slice(solution.policy, 1, 1, 1);
  CHECK(slice.size() == 41);
  CHECK(slice.front().battery == 0);
  CHECK(slice.front().power_units == 0);  // nothing is feasible at zero battery
  CHECK(slice.back().battery == 40);

  SUBCASE("a single battery level yields a single row") {
    config.battery_capacity_units = 0;
    config.static_power_units = 0;
    config.validate();
    const OracleSolution tiny = value_iteration(config, 1e-6);
    CHECK(demand_slice(tiny.policy, 0, 0, 0).size() == 1);
  }

  SUBCASE("live policies slice through their selection rule") {
    FixedPolicy fixed(config, 9);
    const auto fixed_slice = demand_slice(config, fixed, 1, 1, 1);
    CHECK(fixed_slice.size() == 41);
    CHECK(fixed_slice[5].power_units == 0);    // backup regime
    CHECK(fixed_slice[10].power_units == 3);   // budget of 4
    CHECK(fixed_slice[40].power_units == 9);   // full level fits
  }
}

TEST_CASE("offload slice grows with congestion and saturates in arrival") {
  const ScenarioConfig config;  // full grid
  const auto slice = offload_slice(config, 4);
  REQUIRE(slice.size() == config.workload_levels.size() *
                              config.congestion_levels.size());
  const auto rate = [&](int li, int hi) {
    return slice[li * config.congestion_count() + hi].local_rate;
  };
  for (int li = 0; li < config.workload_count(); ++li) {
    for (int hi = 0; hi + 1 < config.congestion_count(); ++hi) {
      CHECK(rate(li, hi) <= rate(li, hi + 1) + 1e-12);
    }
  }
  // at the most congested level, four servers saturate near 43.5 units/sec
  CHECK(rate(6, 4) == doctest::Approx(rate(9, 4)));
  CHECK(rate(6, 4) == doctest::Approx(80.0 - std::sqrt(80.0 / 0.06)).epsilon(1e-6));
  CHECK_THROWS_AS(offload_slice(config, 99), ConfigError);
}

TEST_CASE("comparison report aggregates per-policy runs") {
  ScenarioConfig config = testing::small_scenario();

  SUBCASE("one policy, one seed reduces to that run") {
    const std::vector<std::string> selectors = {"myopic"};
    const std::vector<std::uint64_t> seeds = {11};
    const auto report = compare_policies(config, selectors, 300, seeds);
    REQUIRE(report.policies.size() == 1);
    MyopicPolicy reference(config);
    const RunMetrics direct = run(config, reference, 300, 11).metrics;
    CHECK(report.policies[0].mean_final_cost == direct.final_time_average_cost);
    CHECK(report.policies[0].stddev_final_cost == 0.0);
  }

  SUBCASE("an empty battery start levels every policy") {
    config.init.battery_units = 3;  // below the operation draw
    const std::vector<std::string> selectors = {"pds", "qlearning", "myopic",
                                                "fixed:1.0"};
    const std::vector<std::uint64_t> seeds = {4};
    const auto report = compare_policies(config, selectors, 1, seeds);
    for (const auto& summary : report.policies) {
      CHECK(summary.mean_final_cost ==
            report.policies.front().mean_final_cost);
    }
  }
}
