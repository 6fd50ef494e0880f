#pragma once

// Flat `key = value` experiment configuration. Blank lines and lines whose
// first non-blank character is '#' are ignored. Lists are comma separated.

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ksfrag/errors.hpp"

namespace ksfrag::experiment {

enum class Model { u1_ladder, su2_matter };

inline std::string to_string(Model m) { return m == Model::u1_ladder ? "u1-ladder" : "su2-matter"; }

struct ExperimentConfig {
  Model model = Model::u1_ladder;
  std::optional<int> L;
  std::optional<int> N;
  std::optional<int> Lambda;
  std::optional<double> g;
  std::optional<double> m;
  std::optional<std::string> observable;
  std::optional<std::vector<int>> initial_state;
  double t_max = 50.0;
  int t_points = 200;
  std::optional<double> cutoff;
  std::optional<std::vector<int>> cutoff_range;
  std::optional<std::vector<int>> L_range;
  std::optional<std::vector<int>> N_range;
  std::optional<std::vector<double>> g_range;
  std::optional<std::vector<int>> counter_s;
  double overlap_threshold = 0.05;
  int sw_instances = 10;
  unsigned long long seed = 1;
  std::optional<std::string> output_dir;

  /// Keys in file order with their raw values, for the metadata echo.
  std::vector<std::pair<std::string, std::string>> entries;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  text = trim(text);
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty())
    throw ConfigError("config: key '" + std::string(key) + "' expects a number, got '" + std::string(text) + "'");
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) throw ConfigError("config: key '" + std::string(key) + "' must be finite");
  }
  return value;
}

template <class T>
std::vector<T> parse_list(std::string_view key, std::string_view text) {
  std::vector<T> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(parse_number<T>(key, text.substr(start, comma == std::string_view::npos ? text.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace detail

inline ExperimentConfig parse_config(std::string_view text) {
  using detail::parse_list;
  using detail::parse_number;
  ExperimentConfig c;
  std::set<std::string> seen;
  bool has_model = false;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key(detail::trim(line.substr(0, eq)));
    const auto value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    if (!seen.insert(key).second) throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    if (value.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": key '" + key + "' has no value");
    c.entries.emplace_back(key, std::string(value));

    if (key == "model") {
      if (value == "u1-ladder") c.model = Model::u1_ladder;
      else if (value == "su2-matter") c.model = Model::su2_matter;
      else throw ConfigError("config: model must be u1-ladder or su2-matter, got '" + std::string(value) + "'");
      has_model = true;
    } else if (key == "L") c.L = parse_number<int>(key, value);
    else if (key == "N") c.N = parse_number<int>(key, value);
    else if (key == "Lambda") c.Lambda = parse_number<int>(key, value);
    else if (key == "g") c.g = parse_number<double>(key, value);
    else if (key == "m") c.m = parse_number<double>(key, value);
    else if (key == "observable") c.observable = std::string(value);
    else if (key == "initial_state") c.initial_state = parse_list<int>(key, value);
    else if (key == "t_max") c.t_max = parse_number<double>(key, value);
    else if (key == "t_points") c.t_points = parse_number<int>(key, value);
    else if (key == "cutoff") c.cutoff = parse_number<double>(key, value);
    else if (key == "cutoff_range") c.cutoff_range = parse_list<int>(key, value);
    else if (key == "L_range") c.L_range = parse_list<int>(key, value);
    else if (key == "N_range") c.N_range = parse_list<int>(key, value);
    else if (key == "g_range") c.g_range = parse_list<double>(key, value);
    else if (key == "counter_s") c.counter_s = parse_list<int>(key, value);
    else if (key == "overlap_threshold") c.overlap_threshold = parse_number<double>(key, value);
    else if (key == "sw_instances") c.sw_instances = parse_number<int>(key, value);
    else if (key == "seed") c.seed = parse_number<unsigned long long>(key, value);
    else if (key == "output_dir") c.output_dir = std::string(value);
    else throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
  if (!has_model) throw ConfigError("config: missing required key 'model'");
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

/// Subcommand-level checks, run before any computation.
namespace require {

template <class T>
const T& key(const std::optional<T>& v, const char* name) {
  if (!v) throw ConfigError(std::string("config: missing required key '") + name + "'");
  return *v;
}

inline void model(const ExperimentConfig& c, Model m, const char* command) {
  if (c.model != m)
    throw ConfigError(std::string(command) + ": requires model = " + to_string(m) + ", got " + to_string(c.model));
}

inline void positive(double v, const char* name) {
  if (!(v > 0.0)) throw ConfigError(std::string("config: '") + name + "' must be positive");
}

inline void at_least(int v, int lo, const char* name) {
  if (v < lo) throw ConfigError(std::string("config: '") + name + "' must be >= " + std::to_string(lo));
}

inline void time_grid(const ExperimentConfig& c) {
  positive(c.t_max, "t_max");
  at_least(c.t_points, 2, "t_points");
}

}  // namespace require

}  // namespace ksfrag::experiment
