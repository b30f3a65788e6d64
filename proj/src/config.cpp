#include "greenedge/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "greenedge/dynamics.hpp"
#include "greenedge/errors.hpp"

namespace greenedge {

namespace {

constexpr double kDefaultWorkloadStay = 0.6;
constexpr double kDefaultEnvStay = 0.7;
constexpr double kDefaultCongestionStay = 0.6;
constexpr double kRowSumTolerance = 1e-9;

std::string trim(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = text.find_last_not_of(" \t\r\n");
  return text.substr(begin, end - begin + 1);
}

std::vector<std::string> split_tokens(const std::string& text, char extra_sep = ',') {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == extra_sep) {
      if (!current.empty()) tokens.push_back(std::move(current)), current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

// Raw key=value pairs in file order, with duplicate detection.
class KeyValues {
 public:
  explicit KeyValues(const std::string& text) {
    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
      ++line_no;
      if (const auto hash = line.find('#'); hash != std::string::npos) {
        line.erase(hash);
      }
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("line " + std::to_string(line_no) +
                          ": expected key = value");
      }
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) {
        throw ConfigError("line " + std::to_string(line_no) + ": empty key");
      }
      if (!values_.emplace(key, value).second) {
        throw ConfigError("duplicate key: " + key);
      }
    }
  }

  std::optional<std::string> take(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    std::string value = it->second;
    values_.erase(it);
    return value;
  }

  void require_empty() const {
    if (!values_.empty()) {
      throw ConfigError("unknown key: " + values_.begin()->first);
    }
  }

 private:
  std::map<std::string, std::string> values_;
};

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t consumed = 0;
    const double parsed = std::stod(value, &consumed);
    if (consumed != value.size()) throw std::invalid_argument(value);
    return parsed;
  } catch (const std::exception&) {
    throw ConfigError(key + ": cannot parse '" + value + "' as a number");
  }
}

long long to_int(const std::string& key, const std::string& value) {
  try {
    std::size_t consumed = 0;
    const long long parsed = std::stoll(value, &consumed);
    if (consumed != value.size()) throw std::invalid_argument(value);
    return parsed;
  } catch (const std::exception&) {
    throw ConfigError(key + ": cannot parse '" + value + "' as an integer");
  }
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError(key + ": cannot parse '" + value + "' as a boolean");
}

std::vector<double> to_double_list(const std::string& key, const std::string& value) {
  std::vector<double> parsed;
  for (const auto& token : split_tokens(value)) {
    parsed.push_back(to_double(key, token));
  }
  if (parsed.empty()) throw ConfigError(key + ": empty list");
  return parsed;
}

// Rows separated by ';', entries by spaces or commas.
Matrix to_matrix(const std::string& key, const std::string& value) {
  Matrix rows;
  std::string row_text;
  std::istringstream stream(value);
  while (std::getline(stream, row_text, ';')) {
    std::vector<double> row;
    for (const auto& token : split_tokens(row_text)) {
      row.push_back(to_double(key, token));
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError(key + ": empty matrix");
  return rows;
}

void apply_double(KeyValues& kv, const std::string& key, double& field) {
  if (auto value = kv.take(key)) field = to_double(key, *value);
}

void apply_int(KeyValues& kv, const std::string& key, int& field) {
  if (auto value = kv.take(key)) field = static_cast<int>(to_int(key, *value));
}

void apply_chain(KeyValues& kv, const std::string& name, Matrix& field,
                 int size, double default_stay) {
  const auto rows = kv.take(name + ".rows");
  const auto stay = kv.take(name + ".stay");
  if (rows && stay) {
    throw ConfigError(name + ": give either .rows or .stay, not both");
  }
  if (rows) {
    field = to_matrix(name + ".rows", *rows);
  } else {
    field = default_chain(size, stay ? to_double(name + ".stay", *stay)
                                     : default_stay);
  }
}

void check_matrix(const std::string& name, const Matrix& matrix, int size) {
  if (static_cast<int>(matrix.size()) != size) {
    throw ConfigError(name + ": expected " + std::to_string(size) + " rows, got " +
                      std::to_string(matrix.size()));
  }
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    const auto& row = matrix[i];
    if (static_cast<int>(row.size()) != size) {
      throw ConfigError(name + ": row " + std::to_string(i) + " has " +
                        std::to_string(row.size()) + " entries, expected " +
                        std::to_string(size));
    }
    double sum = 0.0;
    for (double p : row) {
      if (p < 0.0) {
        throw ConfigError(name + ": row " + std::to_string(i) +
                          " has a negative entry");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw ConfigError(name + ": row " + std::to_string(i) + " sums to " +
                        std::to_string(sum) + ", expected 1");
    }
  }
}

void check_ascending(const std::string& name, const std::vector<double>& levels) {
  if (levels.empty()) throw ConfigError(name + ": must not be empty");
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
    if (!(levels[i] < levels[i + 1])) {
      throw ConfigError(name + ": levels must be strictly ascending");
    }
  }
  if (levels.front() < 0.0) throw ConfigError(name + ": levels must be >= 0");
}

void check_rate_exponent(const std::string& name, double exponent) {
  // 1/n^x needs x in (0.5, 1] for a divergent sum with summable squares.
  if (!(exponent > 0.5 && exponent <= 1.0)) {
    throw ConfigError(name + ": rate exponent must lie in (0.5, 1]");
  }
}

}  // namespace

ScenarioConfig::ScenarioConfig() {
  transition_workload = default_chain(workload_count(), kDefaultWorkloadStay);
  transition_env = default_chain(env_count(), kDefaultEnvStay);
  transition_congestion = default_chain(congestion_count(), kDefaultCongestionStay);
}

int ScenarioConfig::watts_to_units(double watts) const {
  return static_cast<int>(std::floor(watts * slot_hours / energy_unit_wh + 0.5));
}

void ScenarioConfig::validate() const {
  check_ascending("workload_levels_units_per_sec", workload_levels);
  check_ascending("congestion_levels_sec_per_unit", congestion_levels);
  if (env_labels.empty()) throw ConfigError("env_labels: must not be empty");

  if (energy_unit_wh <= 0.0) throw ConfigError("energy_unit_wh: must be > 0");
  if (slot_hours <= 0.0) throw ConfigError("slot_hours: must be > 0");
  if (battery_capacity_units < 0) throw ConfigError("battery_capacity_units: must be >= 0");
  if (max_servers < 0) throw ConfigError("max_servers: must be >= 0");
  if (server_power_units <= 0) throw ConfigError("server_power_units: must be > 0");
  if (service_rate <= 0.0) throw ConfigError("service_rate_units_per_sec: must be > 0");
  if (static_power_units < 0) throw ConfigError("static_power_units: must be >= 0");
  if (dyn_power_coeff < 0.0) throw ConfigError("dyn_power_watts_per_unit: must be >= 0");
  if (wireless_capacity <= 0.0) throw ConfigError("wireless_capacity_units_per_sec: must be > 0");
  if (depreciation_cost < 0.0) throw ConfigError("depreciation_cost_per_unit: must be >= 0");
  if (backup_cost_coeff < 0.0) throw ConfigError("backup_cost_per_unit: must be >= 0");
  if (!(discount > 0.0 && discount < 1.0)) throw ConfigError("discount: must lie in (0, 1)");

  if (workload_levels.back() >= wireless_capacity) {
    throw ConfigError(
        "workload_levels_units_per_sec: maximum arrival rate must stay below "
        "wireless_capacity_units_per_sec");
  }
  if (battery_capacity_units < static_power_units) {
    throw ConfigError(
        "battery_capacity_units: battery must hold at least one slot of "
        "static operation power");
  }

  if (static_cast<int>(green_mean_watts.size()) != env_count()) {
    throw ConfigError("green_mean_watts: expected one entry per environment state");
  }
  if (static_cast<int>(green_std_watts.size()) != env_count()) {
    throw ConfigError("green_std_watts: expected one entry per environment state");
  }
  for (double stddev : green_std_watts) {
    if (stddev < 0.0) throw ConfigError("green_std_watts: must be >= 0");
  }

  check_matrix("transition_workload", transition_workload, workload_count());
  check_matrix("transition_env", transition_env, env_count());
  check_matrix("transition_congestion", transition_congestion, congestion_count());

  check_rate_exponent("learn.cost_rate_exponent", learn.cost_rate_exponent);
  check_rate_exponent("learn.value_rate_exponent", learn.value_rate_exponent);
  check_rate_exponent("learn.q_rate_exponent", learn.q_rate_exponent);
  if (learn.q_epsilon_min < 0.0 || learn.q_epsilon_min > 1.0) {
    throw ConfigError("learn.q_epsilon_min: must lie in [0, 1]");
  }
  if (learn.q_epsilon_exponent <= 0.0) {
    throw ConfigError("learn.q_epsilon_exponent: must be > 0");
  }
  if (learn.fixed_power_kw < 0.0) {
    throw ConfigError("learn.fixed_power_kw: must be >= 0");
  }

  if (init.battery_units < -1 || init.battery_units > battery_capacity_units) {
    throw ConfigError("init.battery_units: outside [0, battery capacity]");
  }
  if (init.workload_idx < -1 || init.workload_idx >= workload_count()) {
    throw ConfigError("init.workload_idx: out of range");
  }
  if (init.env_idx < -1 || init.env_idx >= env_count()) {
    throw ConfigError("init.env_idx: out of range");
  }
  if (init.congestion_idx < -1 || init.congestion_idx >= congestion_count()) {
    throw ConfigError("init.congestion_idx: out of range");
  }
}

ScenarioConfig parse_config(const std::string& text) {
  KeyValues kv(text);
  ScenarioConfig config;

  if (auto v = kv.take("workload_levels_units_per_sec")) {
    config.workload_levels = to_double_list("workload_levels_units_per_sec", *v);
  }
  if (auto v = kv.take("congestion_levels_sec_per_unit")) {
    config.congestion_levels = to_double_list("congestion_levels_sec_per_unit", *v);
  }
  if (auto v = kv.take("env_labels")) {
    config.env_labels = split_tokens(*v);
    if (config.env_labels.empty()) throw ConfigError("env_labels: empty list");
  }

  apply_double(kv, "energy_unit_wh", config.energy_unit_wh);
  apply_double(kv, "slot_hours", config.slot_hours);

  const auto capacity_units = kv.take("battery_capacity_units");
  const auto capacity_kwh = kv.take("battery_capacity_kwh");
  if (capacity_units && capacity_kwh) {
    throw ConfigError(
        "battery_capacity_units: give either units or kwh, not both");
  }
  if (capacity_units) {
    config.battery_capacity_units =
        static_cast<int>(to_int("battery_capacity_units", *capacity_units));
  } else if (capacity_kwh) {
    if (config.energy_unit_wh <= 0.0) throw ConfigError("energy_unit_wh: must be > 0");
    const double kwh = to_double("battery_capacity_kwh", *capacity_kwh);
    config.battery_capacity_units =
        static_cast<int>(std::floor(kwh * 1000.0 / config.energy_unit_wh + 0.5));
  }

  apply_int(kv, "max_servers", config.max_servers);
  apply_int(kv, "server_power_units", config.server_power_units);
  apply_double(kv, "service_rate_units_per_sec", config.service_rate);
  apply_int(kv, "static_power_units", config.static_power_units);
  apply_double(kv, "dyn_power_watts_per_unit", config.dyn_power_coeff);
  apply_double(kv, "wireless_capacity_units_per_sec", config.wireless_capacity);
  apply_double(kv, "depreciation_cost_per_unit", config.depreciation_cost);
  apply_double(kv, "backup_cost_per_unit", config.backup_cost_coeff);
  apply_double(kv, "discount", config.discount);

  if (auto v = kv.take("green_mean_watts")) {
    config.green_mean_watts = to_double_list("green_mean_watts", *v);
  }
  if (auto v = kv.take("green_std_watts")) {
    config.green_std_watts = to_double_list("green_std_watts", *v);
  }

  apply_chain(kv, "transition_workload", config.transition_workload,
              config.workload_count(), kDefaultWorkloadStay);
  apply_chain(kv, "transition_env", config.transition_env, config.env_count(),
              kDefaultEnvStay);
  apply_chain(kv, "transition_congestion", config.transition_congestion,
              config.congestion_count(), kDefaultCongestionStay);

  apply_double(kv, "learn.cost_rate_exponent", config.learn.cost_rate_exponent);
  apply_double(kv, "learn.value_rate_exponent", config.learn.value_rate_exponent);
  apply_double(kv, "learn.q_rate_exponent", config.learn.q_rate_exponent);
  apply_double(kv, "learn.q_epsilon_min", config.learn.q_epsilon_min);
  apply_double(kv, "learn.q_epsilon_exponent", config.learn.q_epsilon_exponent);
  apply_double(kv, "learn.fixed_power_kw", config.learn.fixed_power_kw);

  if (auto v = kv.take("depreciation_includes_operation")) {
    config.depreciation_includes_operation =
        to_bool("depreciation_includes_operation", *v);
  }

  if (auto v = kv.take("init.battery_units")) {
    config.init.battery_units =
        (*v == "full") ? -1 : static_cast<int>(to_int("init.battery_units", *v));
  }
  apply_int(kv, "init.workload_idx", config.init.workload_idx);
  apply_int(kv, "init.env_idx", config.init.env_idx);
  apply_int(kv, "init.congestion_idx", config.init.congestion_idx);

  if (auto v = kv.take("seed")) {
    config.seed = static_cast<std::uint64_t>(to_int("seed", *v));
  }

  kv.require_empty();
  config.validate();
  return config;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream file(path);
  if (!file) {
    throw ConfigError("cannot open config file: " + path.string());
  }
  std::ostringstream text;
  text << file.rdbuf();
  return parse_config(text.str());
}

}  // namespace greenedge
