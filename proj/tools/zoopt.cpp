#include <iostream>

#include <CLI11.hpp>

#include "zoopt/cli.hpp"

int main(int argc, char** argv) {
  using namespace zoopt;
  CLI::App app{"zoopt: zeroth-order adaptive momentum experiments"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run an experiment from a config file");
  run->add_option("config", config_path, "Config file")->required();

  auto* sweep = app.add_subcommand("sweep", "Run every combination of sweep.<key> values");
  sweep->add_option("config", config_path, "Config file")->required();

  app.add_subcommand("prop1", "Euclidean vs Mahalanobis projection on the counterexample LP");

  std::string suite;
  double mu_floor = 0.0;
  auto* validate = app.add_subcommand("validate", "Run property suites");
  validate->add_option("suite", suite, "smoothing, estimators, geometry, reductions or all")
      ->required();
  auto* floor_opt =
      validate->add_option("--mu-floor", mu_floor, "Override the estimator floor (smoothing suite)");

  std::string mode = "per-image";
  std::string optimizers = "zo-adamm,zo-psgd";
  std::string formulation = "constrained";
  AttackRequest request;
  auto* attack = app.add_subcommand("attack", "Black-box attacks on the pinned victim inputs");
  attack->add_option("--mode", mode, "per-image or universal")->capture_default_str();
  attack->add_option("--m", request.m, "Number of pinned inputs")->capture_default_str();
  attack->add_option("--opt", optimizers, "Comma-separated optimizers")->capture_default_str();
  attack->add_option("--budget", request.budget, "Query budget per run")->capture_default_str();
  attack->add_option("--seed", request.seed, "First seed")->capture_default_str();
  attack->add_option("--repeat", request.repeat, "Number of seeds")->capture_default_str();
  attack->add_option("--out", request.out_dir, "Output directory")->capture_default_str();
  attack->add_option("--threads", request.threads, "Worker threads")->capture_default_str();
  attack->add_option("--formulation", formulation, "constrained or unconstrained")
      ->capture_default_str();
  attack->add_option("--lambda", request.options.lambda, "Loss weight")->capture_default_str();
  attack->add_option("--kappa", request.options.kappa, "Confidence margin")->capture_default_str();
  attack->add_option("--model", request.model_path, "TinyMlp JSON (default: built-in)");
  attack->add_option("--inputs", request.inputs_path, "Labelled inputs JSON (default: built-in)");

  std::string export_dir = "data";
  auto* export_victim =
      app.add_subcommand("export-victim", "Write the victim model and pinned inputs as JSON");
  export_victim->add_option("--out", export_dir, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  if (*run) return cmd_run(config_path, std::cout, std::cerr);
  if (*sweep) return cmd_sweep(config_path, std::cout, std::cerr);
  if (app.got_subcommand("prop1")) return cmd_prop1(std::cout);
  if (*export_victim) return cmd_export_victim(export_dir, std::cout, std::cerr);
  if (*validate) {
    return cmd_validate(suite, std::cout, std::cerr,
                        floor_opt->count() ? std::optional<double>(mu_floor) : std::nullopt);
  }
  try {
    request.scope = parse_attack_scope(mode);
    request.options.mode = parse_attack_mode(formulation);
    request.optimizers.clear();
    for (const auto& name : split_list(optimizers)) request.optimizers.push_back(parse_algorithm(name));
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return cmd_attack(request, std::cout, std::cerr);
}
