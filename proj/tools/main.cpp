// Command-line front end: scenario loading, experiment drivers, and CSV/JSON
// artifact export.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include "greenedge/csv.hpp"
#include "greenedge/errors.hpp"
#include "greenedge/harness.hpp"
#include "greenedge/learners.hpp"
#include "greenedge/oracle.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
  std::string config_path;
  std::vector<std::string> policies;
  int slots = 10000;
  std::vector<std::uint64_t> seeds;
  std::string out_dir = "out";
  double fixed_kw = -1.0;
  double oracle_tol = 1e-6;
  bool myopic_maxspend = false;
  // export-policy
  std::string source = "oracle";
  bool fig5 = false;
  bool fig9 = false;
  int workload_idx = -1;
  int env_idx = -1;
  int congestion_idx = -1;
  int servers = 4;
};

greenedge::ScenarioConfig load(const Options& opt) {
  greenedge::ScenarioConfig config = opt.config_path.empty()
                                         ? greenedge::ScenarioConfig{}
                                         : greenedge::load_config(opt.config_path);
  if (opt.fixed_kw >= 0.0) config.learn.fixed_power_kw = opt.fixed_kw;
  config.validate();
  return config;
}

std::vector<std::uint64_t> seeds_or_default(const Options& opt,
                                            const greenedge::ScenarioConfig& config) {
  if (!opt.seeds.empty()) return opt.seeds;
  return {config.seed};
}

std::string file_tag(std::string selector) {
  for (char& c : selector) {
    if (c == ':' || c == '.') c = '-';
  }
  return selector;
}

json metrics_json(const greenedge::RunMetrics& metrics) {
  return json{{"time_average_cost", metrics.final_time_average_cost},
              {"composition",
               {{"delay", metrics.delay_fraction},
                {"depreciation", metrics.depreciation_fraction},
                {"backup", metrics.backup_fraction}}},
              {"histogram", metrics.battery_histogram}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_run_artifacts(const fs::path& dir, const std::string& stem,
                         const greenedge::RunResult& result) {
  std::ostringstream trace;
  greenedge::write_trace_csv(trace, result.trace);
  write_text(dir / (stem + ".csv"), trace.str());
  write_text(dir / (stem + ".metrics.json"), metrics_json(result.metrics).dump(2) + "\n");
}

int cmd_run(const Options& opt) {
  const auto config = load(opt);
  const auto seeds = seeds_or_default(opt, config);
  const std::string selector = opt.policies.empty() ? "pds" : opt.policies.front();
  fs::create_directories(opt.out_dir);
  for (std::uint64_t seed : seeds) {
    auto policy = greenedge::make_policy(config, selector, seed, opt.myopic_maxspend);
    const auto result = greenedge::run(config, *policy, opt.slots, seed);
    const std::string stem = seeds.size() == 1
                                 ? std::string("trace")
                                 : "trace_seed" + std::to_string(seed);
    write_run_artifacts(opt.out_dir, stem, result);
    std::cout << selector << " seed " << seed << ": time-average cost "
              << greenedge::format_double(result.metrics.final_time_average_cost)
              << "\n";
  }
  return 0;
}

json summary_json(const greenedge::PolicySummary& summary) {
  return json{{"policy", summary.selector},
              {"mean_final_cost", summary.mean_final_cost},
              {"stddev_final_cost", summary.stddev_final_cost},
              {"final_costs", summary.final_costs},
              {"composition",
               {{"delay", summary.mean_delay_fraction},
                {"depreciation", summary.mean_depreciation_fraction},
                {"backup", summary.mean_backup_fraction}}},
              {"battery_histogram", summary.mean_battery_histogram}};
}

int cmd_compare(const Options& opt) {
  const auto config = load(opt);
  const auto seeds = seeds_or_default(opt, config);
  std::vector<std::string> selectors = opt.policies;
  if (selectors.empty()) {
    selectors = {"pds", "qlearning", "myopic", "fixed:1.0", "fixed:0.4"};
  }
  fs::create_directories(opt.out_dir);

  json report;
  report["slots"] = opt.slots;
  report["seeds"] = seeds;
  report["policies"] = json::array();
  bool aborted = false;
  std::string abort_reason;
  for (const std::string& selector : selectors) {
    try {
      const auto partial = greenedge::compare_policies(
          config, std::span(&selector, 1), opt.slots, seeds, opt.myopic_maxspend);
      report["policies"].push_back(summary_json(partial.policies.front()));
      const auto& s = partial.policies.front();
      std::cout << s.selector << ": mean cost "
                << greenedge::format_double(s.mean_final_cost) << " (stddev "
                << greenedge::format_double(s.stddev_final_cost) << "), backup share "
                << greenedge::format_double(s.mean_backup_fraction) << "\n";
    } catch (const std::exception& e) {
      aborted = true;
      abort_reason = std::string(e.what()) + " (policy " + selector + ")";
      break;
    }
  }
  write_text(fs::path(opt.out_dir) / "report.json", report.dump(2) + "\n");
  if (aborted) {
    std::cerr << "compare aborted: " << abort_reason
              << "; partial report preserved\n";
    return 3;
  }
  return 0;
}

int cmd_oracle(const Options& opt) {
  const auto config = load(opt);
  fs::create_directories(opt.out_dir);
  const auto solution = greenedge::value_iteration(config, opt.oracle_tol);
  const auto pds_values = greenedge::pds_value(config, solution.values);

  std::ostringstream c_csv, v_csv, p_csv;
  greenedge::write_value_csv(c_csv, config, solution.values);
  greenedge::write_value_csv(v_csv, config, pds_values);
  greenedge::write_policy_csv(p_csv, config, solution.policy);
  write_text(fs::path(opt.out_dir) / "c_star.csv", c_csv.str());
  write_text(fs::path(opt.out_dir) / "v_star.csv", v_csv.str());
  write_text(fs::path(opt.out_dir) / "policy.csv", p_csv.str());

  std::cout << "solved in " << solution.values.iterations
            << " sweeps, final update "
            << greenedge::format_double(solution.values.final_delta) << "\n";
  return 0;
}

int cmd_export_policy(const Options& opt) {
  const auto config = load(opt);
  fs::create_directories(opt.out_dir);
  const bool both = !opt.fig5 && !opt.fig9;

  if (opt.fig5 || both) {
    const int li = opt.workload_idx >= 0 ? opt.workload_idx : config.workload_count() / 2;
    const int ei = opt.env_idx >= 0 ? opt.env_idx : config.env_count() / 2;
    const int hi = opt.congestion_idx >= 0 ? opt.congestion_idx : config.congestion_count() / 2;
    std::vector<greenedge::DemandSlicePoint> slice;
    if (opt.source == "oracle") {
      const auto policy = greenedge::value_iteration(config, opt.oracle_tol).policy;
      slice = greenedge::demand_slice(policy, li, ei, hi);
    } else {
      const auto seeds = seeds_or_default(opt, config);
      auto learner = greenedge::make_policy(config, opt.source, seeds.front(),
                                            opt.myopic_maxspend);
      greenedge::run(config, *learner, opt.slots, seeds.front());
      slice = greenedge::demand_slice(config, *learner, li, ei, hi);
    }
    std::ostringstream csv;
    greenedge::write_demand_slice_csv(csv, config, slice);
    write_text(fs::path(opt.out_dir) / "demand_slice.csv", csv.str());
  }

  if (opt.fig9 || both) {
    const auto slice = greenedge::offload_slice(config, opt.servers);
    std::ostringstream csv;
    greenedge::write_offload_slice_csv(csv, slice);
    write_text(fs::path(opt.out_dir) / "offload_slice.csv", csv.str());
  }
  return 0;
}

int cmd_sweep(const Options& opt) {
  const auto config = load(opt);
  const auto seeds = seeds_or_default(opt, config);
  std::vector<std::string> selectors = opt.policies;
  if (selectors.empty()) {
    selectors = {"pds", "qlearning", "myopic", "fixed:1.0", "fixed:0.4"};
  }

  struct Job {
    std::string selector;
    std::uint64_t seed;
    std::future<greenedge::RunResult> future;
  };
  std::vector<Job> jobs;
  for (const std::string& selector : selectors) {
    for (std::uint64_t seed : seeds) {
      jobs.push_back({selector, seed,
                      std::async(std::launch::async, [&config, selector, seed,
                                                      &opt] {
                        auto policy = greenedge::make_policy(config, selector, seed,
                                                             opt.myopic_maxspend);
                        return greenedge::run(config, *policy, opt.slots, seed);
                      })});
    }
  }

  fs::create_directories(opt.out_dir);
  for (Job& job : jobs) {
    const auto result = job.future.get();
    const std::string stem =
        file_tag(job.selector) + "_seed" + std::to_string(job.seed);
    write_run_artifacts(opt.out_dir, stem, result);
  }
  std::cout << "wrote " << jobs.size() << " runs to " << opt.out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator and tabular learners for a renewable-powered edge "
               "system with offloading and autoscaling"};
  app.require_subcommand(1);

  Options opt;
  app.add_option("--config", opt.config_path, "Scenario file (empty = defaults)")
      ->group("common");

  auto add_common = [&](CLI::App* cmd, bool with_policy) {
    cmd->add_option("--config", opt.config_path, "Scenario file");
    cmd->add_option("--slots", opt.slots, "Slots per run");
    cmd->add_option("--seeds", opt.seeds, "Seeds (one run per seed)");
    cmd->add_option("--out", opt.out_dir, "Output directory");
    cmd->add_option("--fixed-kw", opt.fixed_kw, "Level for the fixed policy, kW");
    cmd->add_flag("--myopic-maxspend", opt.myopic_maxspend,
                  "Myopic baseline spends the whole budget");
    if (with_policy) {
      cmd->add_option("--policy", opt.policies,
                      "pds | qlearning | myopic | fixed:<kW>");
    }
  };

  auto* run_cmd = app.add_subcommand("run", "Simulate one policy");
  add_common(run_cmd, true);

  auto* compare_cmd =
      app.add_subcommand("compare", "Run several policies over shared seeds");
  add_common(compare_cmd, true);

  auto* oracle_cmd =
      app.add_subcommand("oracle", "Solve the scenario exactly and export tables");
  add_common(oracle_cmd, false);
  oracle_cmd->add_option("--oracle-tol", opt.oracle_tol,
                         "Sup-norm tolerance on the value function");

  auto* export_cmd =
      app.add_subcommand("export-policy", "Export policy map slices");
  add_common(export_cmd, false);
  export_cmd->add_option("--source", opt.source,
                         "oracle (default) or a trainable policy selector");
  export_cmd->add_option("--oracle-tol", opt.oracle_tol, "Solver tolerance");
  export_cmd->add_flag("--fig5", opt.fig5, "Demand vs battery slice");
  export_cmd->add_flag("--fig9", opt.fig9, "Local rate vs (workload, congestion)");
  export_cmd->add_option("--workload-idx", opt.workload_idx, "Slice workload index");
  export_cmd->add_option("--env-idx", opt.env_idx, "Slice environment index");
  export_cmd->add_option("--congestion-idx", opt.congestion_idx,
                         "Slice congestion index");
  export_cmd->add_option("--servers", opt.servers, "Server count for --fig9");

  auto* sweep_cmd =
      app.add_subcommand("sweep", "Run a (policy x seed) grid and keep all artifacts");
  add_common(sweep_cmd, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(opt);
    if (compare_cmd->parsed()) return cmd_compare(opt);
    if (oracle_cmd->parsed()) return cmd_oracle(opt);
    if (export_cmd->parsed()) return cmd_export_policy(opt);
    if (sweep_cmd->parsed()) return cmd_sweep(opt);
  } catch (const greenedge::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
