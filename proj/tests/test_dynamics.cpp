#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "greenedge/dynamics.hpp"
#include "greenedge/errors.hpp"
#include "support/scenarios.hpp"

using namespace greenedge;

namespace {

// Stationary distribution by power iteration, independent of the sampler.
std::vector<double> stationary(const Matrix& chain) {
  const std::size_t n = chain.size();
  std::vector<double> pi(n, 1.0 / n), next(n);
  for (int iter = 0; iter < 100000; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) next[j] += pi[i] * chain[i][j];
    }
    double drift = 0.0;
    for (std::size_t j = 0; j < n; ++j) drift += std::abs(next[j] - pi[j]);
    pi.swap(next);
    if (drift < 1e-13) break;
  }
  return pi;
}

double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
  double tv = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) tv += std::abs(a[i] - b[i]);
  return tv / 2.0;
}

}  // namespace

TEST_CASE("lazy reflecting walk construction") {
  CHECK(default_chain(1, 0.3) == Matrix{{1.0}});

  const Matrix walk = default_chain(3, 0.5);
  CHECK(walk[0] == std::vector<double>{0.5, 0.5, 0.0});
  CHECK(walk[1] == std::vector<double>{0.25, 0.5, 0.25});
  CHECK(walk[2] == std::vector<double>{0.0, 0.5, 0.5});

  for (int n : {1, 2, 5, 11}) {
    for (double stay : {0.0, 0.4, 1.0}) {
      for (const auto& row : default_chain(n, stay)) {
        double sum = 0.0;
        for (double p : row) sum += p;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }
  CHECK_THROWS_AS(default_chain(0, 0.5), ConfigError);
  CHECK_THROWS_AS(default_chain(3, 1.5), ConfigError);
}

TEST_CASE("exogenous step with degenerate rows") {
  ScenarioConfig config = testing::small_scenario();

  SUBCASE("identity matrices freeze the state") {
    config.transition_workload = default_chain(4, 1.0);
    config.transition_env = default_chain(3, 1.0);
    config.transition_congestion = default_chain(3, 1.0);
    SplitRng rng(1, "exo");
    ExogenousState x{2, 1, 0};
    for (int i = 0; i < 50; ++i) {
      x = step_exogenous(config, x, rng);
      CHECK(x == ExogenousState{2, 1, 0});
    }
  }

  SUBCASE("point-mass rows always land on their target") {
    Matrix jump(4, std::vector<double>(4, 0.0));
    for (auto& row : jump) row[3] = 1.0;
    config.transition_workload = jump;
    SplitRng rng(1, "exo");
    const ExogenousState x = step_exogenous(config, {0, 1, 1}, rng);
    CHECK(x.workload_idx == 3);
  }

  SUBCASE("a step consumes exactly three draws") {
    SplitRng used(9, "stream");
    SplitRng reference(9, "stream");
    (void)step_exogenous(config, {1, 1, 1}, used);
    for (int i = 0; i < 3; ++i) (void)reference.uniform();
    CHECK(used.uniform() == reference.uniform());
  }
}

TEST_CASE("empirical chain frequencies match the stationary distribution") {
  ScenarioConfig config;  // 10-level walk with stay 0.6
  SplitRng rng(11, "chain");
  std::vector<double> counts(config.workload_count(), 0.0);
  ExogenousState x{5, 1, 2};
  const int steps = 100000;
  for (int i = 0; i < steps; ++i) {
    x = step_exogenous(config, x, rng);
    counts[x.workload_idx] += 1.0;
  }
  for (double& c : counts) c /= steps;
  CHECK(total_variation(counts, stationary(config.transition_workload)) <= 0.02);
}

TEST_CASE("green sampling") {
  ScenarioConfig config;

  SUBCASE("deterministic conversions") {
    config.green_std_watts = {0.0, 0.0, 0.0};
    SplitRng rng(3, "green");
    for (int i = 0; i < 20; ++i) CHECK(sample_green(config, 2, rng) == 12);

    config.green_mean_watts = {0.0, 0.0, 0.0};
    for (int i = 0; i < 20; ++i) CHECK(sample_green(config, 0, rng) == 0);
  }

  SUBCASE("medium environment lands on eight units almost always") {
    SplitRng rng(4, "green");
    int hits = 0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) hits += sample_green(config, 1, rng) == 8;
    CHECK(static_cast<double>(hits) / draws > 0.98);
  }
}

TEST_CASE("green pmf") {
  ScenarioConfig config;

  SUBCASE("point mass under zero variance") {
    config.green_std_watts = {0.0, 0.0, 0.0};
    const GreenDistribution dist = green_pmf(config, 1);
    CHECK(dist.pmf.size() == 9);
    CHECK(dist.pmf.back() == 1.0);
  }

  SUBCASE("sums to one and concentrates at the converted mean") {
    for (int e = 0; e < 3; ++e) {
      const GreenDistribution dist = green_pmf(config, e);
      double sum = 0.0;
      for (double p : dist.pmf) {
        CHECK(p >= 0.0);
        sum += p;
      }
      CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
    CHECK(green_pmf(config, 1).pmf[8] > 0.98);
  }

  SUBCASE("matches the sampler within 0.005 total variation") {
    const GreenDistribution dist = green_pmf(config, 0);
    std::vector<double> histogram(dist.pmf.size(), 0.0);
    SplitRng rng(5, "green");
    const int draws = 1000000;
    for (int i = 0; i < draws; ++i) {
      const int g = sample_green(config, 0, rng);
      if (g < static_cast<int>(histogram.size())) histogram[g] += 1.0;
    }
    for (double& h : histogram) h /= draws;
    CHECK(total_variation(histogram, dist.pmf) <= 0.005);
  }
}

TEST_CASE("named streams are reproducible and independent") {
  SplitRng a(42, "environment");
  SplitRng b(42, "environment");
  SplitRng c(42, "policy");
  bool diverged = false;
  for (int i = 0; i < 1000; ++i) {
    const double ua = a.uniform();
    CHECK(ua == b.uniform());
    diverged |= ua != c.uniform();
  }
  CHECK(diverged);
}

TEST_CASE("normal deviates have the requested moments") {
  SplitRng rng(6, "normal");
  double sum = 0.0, sum_sq = 0.0;
  const int draws = 200000;
  for (int i = 0; i < draws; ++i) {
    const double x = rng.normal(400.0, 10.0);
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / draws;
  const double variance = sum_sq / draws - mean * mean;
  CHECK(std::abs(mean - 400.0) < 0.2);
  CHECK(std::abs(std::sqrt(variance) - 10.0) < 0.2);
}
