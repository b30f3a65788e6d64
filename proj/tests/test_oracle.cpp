#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "greenedge/errors.hpp"
#include "greenedge/oracle.hpp"
#include "support/scenarios.hpp"

using namespace greenedge;

TEST_CASE("vanishing discount reduces to the myopic argmin") {
  ScenarioConfig config = testing::small_scenario();
  config.discount = 1e-9;
  const OracleSolution solution = value_iteration(config, 1e-7);
  const ExpectedCostTable costs(config);

  for (std::size_t i = 0; i < solution.policy.entries.size(); ++i) {
    const SystemState s = solution.policy.space.state(i);
    int expected = 0;
    if (!backup_regime(config, s)) {
      double best = std::numeric_limits<double>::infinity();
      for (int a : feasible_actions(config, s)) {
        const int m = a / config.server_power_units;
        const double value =
            costs.cost(s.workload_idx, s.env_idx, s.congestion_idx, m);
        if (value < best) {
          best = value;
          expected = a;
        }
      }
    }
    CHECK(solution.policy.entries[i].power_units == expected);
  }
}

TEST_CASE("degenerate chain matches the geometric closed form") {
  const ScenarioConfig config = testing::degenerate_scenario();
  const OracleSolution solution = value_iteration(config, 2e-9);

  // Arrival 20 at congestion 0.030 on a 120-capacity link, full offload.
  const double slot_cost = 0.2 + 0.6;
  const double steady = slot_cost / (1.0 - config.discount);
  const double backup_slot = slot_cost + config.backup_cost_coeff * 6;
  for (int b = 0; b <= config.battery_capacity_units; ++b) {
    const SystemState s{0, 0, 0, b};
    const double expected =
        b >= 6 ? steady : backup_slot + config.discount * steady;
    CHECK(std::abs(solution.values.at(s) - expected) <= 1e-8);
  }
}

TEST_CASE("small scenario solves to a tight fixed point") {
  const ScenarioConfig config = testing::small_scenario();
  const OracleSolution solution = value_iteration(config, 1e-7);
  CHECK(solution.values.iterations > 10);
  CHECK(bellman_residual(config, solution.values) <= 1e-8);

  SUBCASE("every policy entry is feasible and consistent") {
    for (std::size_t i = 0; i < solution.policy.entries.size(); ++i) {
      const SystemState s = solution.policy.space.state(i);
      const PolicyEntry& entry = solution.policy.entries[i];
      const auto actions = feasible_actions(config, s);
      CHECK(std::find(actions.begin(), actions.end(), entry.power_units) !=
            actions.end());
      CHECK(entry.power_units ==
            entry.servers * config.server_power_units);
      CHECK(entry.local_rate <= config.workload_levels[s.workload_idx] + 1e-12);
    }
  }

  SUBCASE("values never improve with less battery") {
    CHECK(check_value_shape(solution.values).monotonicity.empty());
    const ValueTable post = pds_value(config, solution.values);
    CHECK(check_value_shape(post).monotonicity.empty());
  }

  SUBCASE("post-decision values recompose the normal values") {
    const ValueTable post = pds_value(config, solution.values);
    const ExpectedCostTable costs(config);
    for (std::size_t i = 0; i < solution.values.values.size(); ++i) {
      const SystemState s = solution.values.space.state(i);
      double best = std::numeric_limits<double>::infinity();
      if (backup_regime(config, s)) {
        best = costs.backup_cost(s.workload_idx, s.congestion_idx) +
               config.discount * post.at(s);
      } else {
        for (int a : feasible_actions(config, s)) {
          SystemState tilde = s;
          tilde.battery = pds(config, s, a).post_battery;
          const double value =
              costs.cost(s.workload_idx, s.env_idx, s.congestion_idx,
                         a / config.server_power_units) +
              config.discount * post.at(tilde);
          best = std::min(best, value);
        }
      }
      CHECK(std::abs(best - solution.values.values[i]) <= 1e-8);
    }
  }
}

TEST_CASE("post-decision expectation of a constant is the constant") {
  const ScenarioConfig config = testing::small_scenario();
  ValueTable table;
  table.space = StateSpace(config);
  table.values.assign(table.space.size(), 3.7);
  const ValueTable post = pds_value(config, table);
  for (double v : post.values) CHECK(v == doctest::Approx(3.7).epsilon(1e-12));
}

TEST_CASE("table and scenario shapes must agree") {
  const ScenarioConfig small = testing::small_scenario();
  ValueTable table;
  table.space = StateSpace(small);
  table.values.assign(table.space.size(), 0.0);
  const ScenarioConfig other;  // full-size scenario
  CHECK_THROWS_AS(pds_value(other, table), ConfigError);
  CHECK_THROWS_AS(bellman_residual(other, table), ConfigError);
}

TEST_CASE("monotone policy checker") {
  const ScenarioConfig config = testing::small_scenario();
  PolicyTable policy;
  policy.space = StateSpace(config);
  policy.entries.assign(policy.space.size(), PolicyEntry{});

  SUBCASE("constant policies have no violations") {
    CHECK(check_monotone_policy(policy).empty());
  }

  SUBCASE("a decreasing run is flagged with its location") {
    // demand 6 at battery 10, demand 3 at battery 11, for one triple
    policy.entries[policy.space.index(1, 2, 0, 10)] = {6, 2, 0.0};
    policy.entries[policy.space.index(1, 2, 0, 11)] = {3, 1, 0.0};
    const auto violations = check_monotone_policy(policy);
    REQUIRE(violations.size() == 2);  // 0 -> 6 rise is fine; 6 -> 3 and 3 -> 0
    CHECK(violations[0].workload_idx == 1);
    CHECK(violations[0].env_idx == 2);
    CHECK(violations[0].battery == 10);
    CHECK(violations[0].action_low == 6);
    CHECK(violations[0].action_high == 3);
  }
}

TEST_CASE("single battery level leaves nothing to check") {
  ScenarioConfig config = testing::small_scenario();
  config.battery_capacity_units = 0;
  config.static_power_units = 0;
  config.validate();
  const OracleSolution solution = value_iteration(config, 1e-6);
  CHECK(check_monotone_policy(solution.policy).empty());
  const auto shape = check_value_shape(solution.values);
  CHECK(shape.monotonicity_pairs == 0);
  CHECK(shape.convexity_triples == 0);
}

TEST_CASE("value shape checker") {
  const ScenarioConfig config = testing::small_scenario();
  ValueTable table;
  table.space = StateSpace(config);
  table.values.assign(table.space.size(), 0.0);
  const int nb = table.space.n_battery;

  SUBCASE("linear decay is monotone and convex") {
    for (std::size_t i = 0; i < table.values.size(); ++i) {
      table.values[i] = 10.0 - 0.1 * static_cast<int>(i % nb);
    }
    const auto report = check_value_shape(table);
    CHECK(report.monotonicity.empty());
    CHECK(report.convexity.empty());
    CHECK(report.convexity_triples ==
          table.space.triple_count() * (nb - 2));
  }

  SUBCASE("strictly increasing tables flag every pair") {
    for (std::size_t i = 0; i < table.values.size(); ++i) {
      table.values[i] = static_cast<double>(i % nb);
    }
    const auto report = check_value_shape(table);
    CHECK(report.monotonicity.size() == report.monotonicity_pairs);
    CHECK(report.monotonicity_pairs ==
          table.space.triple_count() * (nb - 1));
  }

  SUBCASE("a single concave kink is reported with its magnitude") {
    // value dips: differences -1, -1, then -3 at battery 20
    for (std::size_t i = 0; i < table.values.size(); ++i) {
      const int b = static_cast<int>(i % nb);
      table.values[i] = 100.0 - b - (b > 20 ? 2.0 * (b - 20) : 0.0);
    }
    const auto report = check_value_shape(table);
    CHECK(report.monotonicity.empty());
    CHECK(report.convexity.size() == table.space.triple_count());
    CHECK(report.convexity.front().battery == 20);
    CHECK(report.convexity.front().magnitude == doctest::Approx(2.0));
  }
}

TEST_CASE("solver guard rails") {
  const ScenarioConfig config = testing::small_scenario();
  CHECK_THROWS_AS(value_iteration(config, -1.0), ConfigError);
  CHECK_THROWS_AS(value_iteration(config, 1e-7, 1000000, 10), NumericError);
  CHECK_THROWS_AS(value_iteration(config, 1e-7, 3), NumericError);
}
