#include "zoopt/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "zoopt/metrics.hpp"
#include "zoopt/problems.hpp"

namespace zoopt {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
    throw ConfigError(key, "expected a finite number, got '" + value + "'");
  }
  return out;
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(key, "expected a non-negative integer, got '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw ConfigError(key, "expected true or false, got '" + value + "'");
}

std::string bool_text(bool v) { return v ? "true" : "false"; }

std::string join(const std::vector<std::size_t>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(values[i]);
  }
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"problem.name",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         static const std::vector<std::string> names{"quadratic", "logistic", "nonconvex",
                                                     "counterexample", "attack"};
         if (std::find(names.begin(), names.end(), v) == names.end()) {
           throw ConfigError(k, "unknown problem '" + v +
                                    "' (quadratic, logistic, nonconvex, counterexample, attack)");
         }
         c.problem = v;
       }},
      {"problem.dim",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.dim = static_cast<Index>(parse_uint(k, v));
       }},
      {"problem.condition",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.condition = parse_double(k, v);
       }},
      {"problem.samples",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.samples = parse_uint(k, v);
       }},
      {"problem.shift_scale",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.shift_scale = parse_double(k, v);
       }},
      {"problem.n",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.logistic_n = parse_uint(k, v);
       }},
      {"problem.radius",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.radius = parse_double(k, v);
       }},
      {"problem.epsilon",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.epsilon = parse_double(k, v);
       }},
      {"problem.omega",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.omega = parse_double(k, v);
       }},
      {"problem.box_half_width",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.box_half_width = parse_double(k, v);
       }},
      {"problem.seed",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.problem_seed = parse_uint(k, v);
       }},
      {"problem.attack.formulation",
       [](ExperimentConfig& c, const std::string&, const std::string& v) {
         c.attack.mode = parse_attack_mode(v);
       }},
      {"problem.attack.lambda",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.attack.lambda = parse_double(k, v);
       }},
      {"problem.attack.kappa",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.attack.kappa = parse_double(k, v);
       }},
      {"problem.attack.images",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.attack_images.clear();
         for (const auto& item : split_list(v)) c.attack_images.push_back(parse_uint(k, item));
         if (c.attack_images.empty()) throw ConfigError(k, "needs at least one image index");
       }},
      {"problem.attack.model",
       [](ExperimentConfig& c, const std::string&, const std::string& v) { c.attack_model = v; }},
      {"problem.attack.inputs",
       [](ExperimentConfig& c, const std::string&, const std::string& v) { c.attack_inputs = v; }},
      {"optimizer.name", [](ExperimentConfig&, const std::string&, const std::string&) {}},
      {"optimizer.beta1",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.opt.beta1 = parse_double(k, v);
       }},
      {"optimizer.beta2",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.opt.beta2 = parse_double(k, v);
       }},
      {"optimizer.alpha",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.opt.alpha = parse_double(k, v);
       }},
      {"optimizer.alpha_schedule",
       [](ExperimentConfig& c, const std::string&, const std::string& v) {
         c.opt.alpha_schedule = parse_step_schedule(v);
       }},
      {"optimizer.mu",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.opt.estimator.mu = parse_double(k, v);
       }},
      {"optimizer.mu_schedule",
       [](ExperimentConfig& c, const std::string&, const std::string& v) {
         c.opt.mu_schedule = parse_smoothing_schedule(v);
       }},
      {"optimizer.mu_floor",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.opt.estimator.mu_floor = parse_double(k, v);
       }},
      {"optimizer.beta1_schedule",
       [](ExperimentConfig& c, const std::string&, const std::string& v) {
         c.opt.beta1_schedule = parse_momentum_schedule(v);
       }},
      {"optimizer.v0",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.opt.v0 = parse_double(k, v);
       }},
      {"optimizer.vhat0",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.opt.vhat0 = parse_double(k, v);
       }},
      {"optimizer.use_vhat_max",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.opt.use_vhat_max = parse_bool(k, v);
       }},
      {"optimizer.b",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.opt.estimator.b = parse_uint(k, v);
       }},
      {"optimizer.q",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.opt.estimator.q = parse_uint(k, v);
       }},
      {"optimizer.direction",
       [](ExperimentConfig& c, const std::string&, const std::string& v) {
         c.opt.estimator.direction = parse_direction(v);
       }},
      {"optimizer.scd_coords",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.opt.scd_coords = parse_uint(k, v);
       }},
      {"optimizer.gradient",
       [](ExperimentConfig& c, const std::string&, const std::string& v) {
         c.opt.gradient = parse_gradient_source(v);
       }},
      {"optimizer.euclidean_projection_override",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.opt.euclidean_projection_override = parse_bool(k, v);
       }},
      {"optimizer.max_iterations",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.opt.max_iterations = static_cast<std::int64_t>(parse_uint(k, v));
       }},
      {"optimizer.trace_stride",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.opt.trace_stride = static_cast<std::int64_t>(parse_uint(k, v));
       }},
      {"run.query_budget",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.query_budget = parse_uint(k, v);
       }},
      {"run.repeat",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.repeat = parse_uint(k, v);
       }},
      {"run.seed",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.base_seed = parse_uint(k, v);
       }},
      {"run.output_dir",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (v.empty()) throw ConfigError(k, "must not be empty");
         c.output_dir = v;
       }},
      {"run.threads",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.threads = parse_uint(k, v);
       }},
      {"run.include_seconds",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.include_seconds = parse_bool(k, v);
       }},
      {"run.approximate_measure",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.approximate_measure = parse_bool(k, v);
       }},
  };
  return table;
}

}  // namespace

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

KeyValues parse_config_text(const std::string& text, const std::string& origin) {
  KeyValues out;
  std::stringstream ss(text);
  std::string line;
  for (int number = 1; std::getline(ss, line); ++number) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(number);
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where, "empty key");
    if (!out.emplace(key, value).second) throw ConfigError(key, "duplicate key at " + where);
  }
  return out;
}

KeyValues load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

ExperimentConfig resolve_experiment(const KeyValues& entries, bool allow_sweep) {
  ExperimentConfig cfg;
  const auto name = entries.find("optimizer.name");
  cfg.opt = default_config(name == entries.end() ? Algorithm::ZoAdaMM : parse_algorithm(name->second));
  for (const auto& [key, value] : entries) {
    if (key.rfind("sweep.", 0) == 0) {
      if (!allow_sweep) throw ConfigError(key, "sweep keys are only valid for the sweep command");
      continue;
    }
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(key, "unknown key");
    it->second(cfg, key, value);
  }
  if (cfg.query_budget == 0) throw ConfigError("run.query_budget", "must be positive");
  if (cfg.repeat == 0) throw ConfigError("run.repeat", "must be positive");
  if (cfg.dim < 1) throw ConfigError("problem.dim", "must be positive");
  if (cfg.condition < 1.0) throw ConfigError("problem.condition", "must be >= 1");
  if (cfg.logistic_n == 0) throw ConfigError("problem.n", "must be positive");
  if (!(cfg.radius > 0.0)) throw ConfigError("problem.radius", "must be positive");
  if (cfg.box_half_width < 0.0) throw ConfigError("problem.box_half_width", "must be >= 0");
  if (!(cfg.attack.lambda > 0.0)) throw ConfigError("problem.attack.lambda", "must be positive");
  if (cfg.attack.kappa < 0.0) throw ConfigError("problem.attack.kappa", "must be >= 0");
  return cfg;
}

KeyValues echo_config(const ExperimentConfig& c) {
  const OptConfig& o = c.opt;
  return {
      {"problem.name", c.problem},
      {"problem.dim", std::to_string(c.dim)},
      {"problem.condition", format_double(c.condition)},
      {"problem.samples", std::to_string(c.samples)},
      {"problem.shift_scale", format_double(c.shift_scale)},
      {"problem.n", std::to_string(c.logistic_n)},
      {"problem.radius", format_double(c.radius)},
      {"problem.epsilon", format_double(c.epsilon)},
      {"problem.omega", format_double(c.omega)},
      {"problem.box_half_width", format_double(c.box_half_width)},
      {"problem.seed", std::to_string(c.problem_seed)},
      {"problem.attack.formulation", to_string(c.attack.mode)},
      {"problem.attack.lambda", format_double(c.attack.lambda)},
      {"problem.attack.kappa", format_double(c.attack.kappa)},
      {"problem.attack.images", join(c.attack_images)},
      {"problem.attack.model", c.attack_model},
      {"problem.attack.inputs", c.attack_inputs},
      {"optimizer.name", to_string(o.algorithm)},
      {"optimizer.beta1", format_double(o.beta1)},
      {"optimizer.beta2", format_double(o.beta2)},
      {"optimizer.alpha", format_double(o.alpha)},
      {"optimizer.alpha_schedule", to_string(o.alpha_schedule)},
      {"optimizer.mu", format_double(o.estimator.mu)},
      {"optimizer.mu_schedule", to_string(o.mu_schedule)},
      {"optimizer.mu_floor", format_double(o.estimator.mu_floor)},
      {"optimizer.beta1_schedule", to_string(o.beta1_schedule)},
      {"optimizer.v0", format_double(o.v0)},
      {"optimizer.vhat0", format_double(o.vhat0)},
      {"optimizer.use_vhat_max", bool_text(o.use_vhat_max)},
      {"optimizer.b", std::to_string(o.estimator.b)},
      {"optimizer.q", std::to_string(o.estimator.q)},
      {"optimizer.direction", to_string(o.estimator.direction)},
      {"optimizer.scd_coords", std::to_string(o.scd_coords)},
      {"optimizer.gradient", to_string(o.gradient)},
      {"optimizer.euclidean_projection_override", bool_text(o.euclidean_projection_override)},
      {"optimizer.max_iterations", std::to_string(o.max_iterations)},
      {"optimizer.trace_stride", std::to_string(o.trace_stride)},
      {"run.query_budget", std::to_string(c.query_budget)},
      {"run.repeat", std::to_string(c.repeat)},
      {"run.seed", std::to_string(c.base_seed)},
      {"run.output_dir", c.output_dir.generic_string()},
      {"run.threads", std::to_string(c.threads)},
      {"run.include_seconds", bool_text(c.include_seconds)},
      {"run.approximate_measure", bool_text(c.approximate_measure)},
  };
}

nlohmann::ordered_json echo_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [k, v] : echo_config(cfg)) j[k] = v;
  return j;
}

ProblemSpec build_problem(const ExperimentConfig& c) {
  if (c.problem == "quadratic") {
    return make_quadratic(c.dim, c.condition, c.problem_seed, c.samples, c.shift_scale);
  }
  if (c.problem == "logistic") return make_logistic(c.logistic_n, c.dim, c.problem_seed, c.radius);
  if (c.problem == "nonconvex") {
    return make_nonconvex(c.dim, c.problem_seed, {c.epsilon, c.omega, c.box_half_width});
  }
  if (c.problem == "counterexample") return make_counterexample_lp();

  TinyMlp model;
  try {
    model = c.attack_model.empty() ? make_victim_model() : load_mlp(c.attack_model);
  } catch (const Error& e) {
    throw ConfigError("problem.attack.model", e.what());
  }
  LabeledInputs pinned;
  try {
    if (c.attack_inputs.empty()) {
      pinned = make_victim_inputs(model);
    } else {
      std::ifstream in(c.attack_inputs);
      if (!in) throw IoError("cannot open inputs file " + c.attack_inputs);
      pinned = inputs_from_json(nlohmann::json::parse(in));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("problem.attack.inputs", e.what());
  } catch (const Error& e) {
    throw ConfigError("problem.attack.inputs", e.what());
  }
  std::vector<Vector> images;
  std::vector<std::size_t> labels;
  for (std::size_t idx : c.attack_images) {
    if (idx >= pinned.inputs.size()) {
      throw ConfigError("problem.attack.images",
                        "index " + std::to_string(idx) + " out of range (have " +
                            std::to_string(pinned.inputs.size()) + " inputs)");
    }
    images.push_back(pinned.inputs[idx]);
    labels.push_back(pinned.labels[idx]);
  }
  return make_attack_problem(model, images, labels, c.attack);
}

std::vector<KeyValues> expand_sweep(const KeyValues& entries) {
  KeyValues base;
  std::vector<std::pair<std::string, std::vector<std::string>>> axes;
  for (const auto& [key, value] : entries) {
    if (key.rfind("sweep.", 0) == 0) {
      const std::string target = key.substr(6);
      if (target.rfind("sweep.", 0) == 0 || target.empty()) throw ConfigError(key, "invalid sweep key");
      auto values = split_list(value);
      if (values.empty()) throw ConfigError(key, "needs at least one value");
      axes.emplace_back(target, std::move(values));
    } else {
      base.emplace(key, value);
    }
  }
  std::vector<KeyValues> out{base};
  for (const auto& [key, values] : axes) {
    std::vector<KeyValues> next;
    for (const auto& partial : out) {
      for (const auto& v : values) {
        KeyValues merged = partial;
        merged[key] = v;
        next.push_back(std::move(merged));
      }
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace zoopt
