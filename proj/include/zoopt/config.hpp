#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "zoopt/optimizers.hpp"
#include "zoopt/problems.hpp"

namespace zoopt {

/// Flat `key = value` entries, sorted by key.
using KeyValues = std::map<std::string, std::string>;

/// Parses `key = value` lines; `#` starts a comment. Duplicate keys and lines
/// without `=` are errors naming the line.
KeyValues parse_config_text(const std::string& text, const std::string& origin = "<config>");

/// Reads and parses a config file. A missing file is a ConfigError naming the path.
KeyValues load_config_file(const std::filesystem::path& path);

struct ExperimentConfig {
  std::string problem = "quadratic";
  Index dim = 20;
  double condition = 10.0;
  std::uint64_t samples = 0;
  double shift_scale = 1.0;
  std::uint64_t logistic_n = 200;
  double radius = 5.0;
  double epsilon = 0.1;
  double omega = 2.0;
  double box_half_width = 0.0;
  std::uint64_t problem_seed = 1;
  AttackOptions attack;
  std::vector<std::size_t> attack_images{0};
  std::string attack_model;
  std::string attack_inputs;

  OptConfig opt;

  std::uint64_t query_budget = 100000;
  std::uint64_t repeat = 1;
  std::uint64_t base_seed = 1;
  std::filesystem::path output_dir = "out";
  std::size_t threads = 1;
  bool include_seconds = false;
  bool approximate_measure = true;
};

/// Builds the experiment from entries. Unknown keys, malformed values and
/// out-of-range settings throw ConfigError naming the key. `sweep.*` keys are
/// rejected unless `allow_sweep` is set (they are then ignored here).
ExperimentConfig resolve_experiment(const KeyValues& entries, bool allow_sweep = false);

/// Every key with its resolved value; enough to re-run exactly.
KeyValues echo_config(const ExperimentConfig& cfg);
nlohmann::ordered_json echo_json(const ExperimentConfig& cfg);

ProblemSpec build_problem(const ExperimentConfig& cfg);

/// `sweep.<key> = a,b,c` entries expanded into the cartesian product (keys in
/// sorted order, last key varying fastest), each merged over the base entries.
std::vector<KeyValues> expand_sweep(const KeyValues& entries);

std::vector<std::string> split_list(const std::string& text);

}  // namespace zoopt
