#include "zoopt/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "zoopt/metrics.hpp"
#include "zoopt/validation.hpp"

namespace zoopt {

namespace {

std::string vector_text(const Vector& v) {
  std::string out = "[";
  for (Index i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v[i]);
  }
  return out + "]";
}

std::string run_stem(const ProblemSpec& problem, const OptConfig& opt, std::uint64_t seed) {
  return problem.tag + "_" + to_string(opt.algorithm) + "_seed" + std::to_string(seed);
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return kExitNumericAbort;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

struct PlannedRun {
  ExperimentConfig cfg;
  std::uint64_t seed;
  std::string stem;
  std::size_t problem_index;
};

int execute_plan(const std::vector<PlannedRun>& plan, const std::vector<ProblemSpec>& problems,
                 std::size_t threads, std::vector<RunOutcome>& outcomes, std::ostream& out,
                 std::ostream& err);

RunOutcome execute_on(const ExperimentConfig& cfg, const ProblemSpec& problem, std::uint64_t seed,
                      const std::string& stem) {
  ExperimentConfig run_cfg = cfg;
  run_cfg.base_seed = seed;
  run_cfg.repeat = 1;
  run_cfg.opt.seed = seed;
  RunOptions options;
  options.approximate_measure = cfg.approximate_measure;
  RunOutcome outcome;
  outcome.result = run_optimizer(problem, run_cfg.opt, cfg.query_budget, options);
  outcome.csv = cfg.output_dir / (stem + ".csv");
  outcome.json = cfg.output_dir / (stem + ".json");
  serialize_csv(outcome.result, outcome.csv);
  const auto envelope = result_envelope(echo_json(run_cfg), outcome.result,
                                        outcome.csv.filename().string(), cfg.include_seconds);
  write_text_file(outcome.json, envelope.dump(2) + "\n");
  return outcome;
}

int execute_plan(const std::vector<PlannedRun>& plan, const std::vector<ProblemSpec>& problems,
                 std::size_t threads, std::vector<RunOutcome>& outcomes, std::ostream& out,
                 std::ostream& err) {
  outcomes.assign(plan.size(), {});
  parallel_for(plan.size(), worker_count(threads), [&](std::size_t k) {
    const auto& p = plan[k];
    outcomes[k] = execute_on(p.cfg, problems[p.problem_index], p.seed, p.stem);
  });
  int code = kExitOk;
  for (std::size_t k = 0; k < plan.size(); ++k) {
    const auto& r = outcomes[k].result;
    out << plan[k].stem << ": iterations=" << r.iterations << " queries=" << r.total_queries
        << " final_loss=" << (r.trace.empty() ? std::string("n/a") : format_double(r.trace.back().loss))
        << " csv=" << outcomes[k].csv.generic_string() << "\n";
    if (r.aborted) {
      err << "numeric abort in " << plan[k].stem << ": " << r.abort_message << "\n";
      code = kExitNumericAbort;
    }
  }
  return code;
}

}  // namespace

std::size_t worker_count(std::size_t configured) {
  if (const char* env = std::getenv("ZOOPT_THREADS"); env && *env) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max<std::size_t>(configured, 1);
}

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& job) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t k = next++; k < n; k = next++) {
      try {
        job(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const std::size_t count = std::min(std::max<std::size_t>(workers, 1), std::max<std::size_t>(n, 1));
  if (count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < count; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

RunOutcome execute_run(const ExperimentConfig& cfg, std::uint64_t seed, const std::string& stem) {
  const ProblemSpec problem = build_problem(cfg);
  ensure_directory(cfg.output_dir);
  return execute_on(cfg, problem, seed, stem);
}

int cmd_run(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() {
    const ExperimentConfig cfg = resolve_experiment(load_config_file(config_path));
    std::vector<ProblemSpec> problems{build_problem(cfg)};
    validate_config(problems[0], cfg.opt, cfg.query_budget);
    ensure_directory(cfg.output_dir);
    std::vector<PlannedRun> plan;
    for (std::uint64_t k = 0; k < cfg.repeat; ++k) {
      const std::uint64_t seed = cfg.base_seed + k;
      plan.push_back({cfg, seed, run_stem(problems[0], cfg.opt, seed), 0});
    }
    std::vector<RunOutcome> outcomes;
    return execute_plan(plan, problems, cfg.threads, outcomes, out, err);
  });
}

int cmd_sweep(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() {
    const KeyValues entries = load_config_file(config_path);
    const ExperimentConfig base = resolve_experiment(entries, true);
    const auto combos = expand_sweep(entries);
    std::vector<ProblemSpec> problems;
    std::vector<PlannedRun> plan;
    std::vector<KeyValues> overrides;
    for (std::size_t c = 0; c < combos.size(); ++c) {
      const ExperimentConfig cfg = resolve_experiment(combos[c]);
      problems.push_back(build_problem(cfg));
      validate_config(problems.back(), cfg.opt, cfg.query_budget);
      ensure_directory(cfg.output_dir);
      KeyValues changed;
      for (const auto& [key, value] : entries) {
        if (key.rfind("sweep.", 0) == 0) changed[key.substr(6)] = combos[c].at(key.substr(6));
      }
      char prefix[32];
      std::snprintf(prefix, sizeof prefix, "sweep%03zu_", c);
      for (std::uint64_t k = 0; k < cfg.repeat; ++k) {
        const std::uint64_t seed = cfg.base_seed + k;
        plan.push_back({cfg, seed, prefix + run_stem(problems.back(), cfg.opt, seed), c});
        overrides.push_back(changed);
      }
    }
    std::vector<RunOutcome> outcomes;
    const int code = execute_plan(plan, problems, base.threads, outcomes, out, err);

    nlohmann::ordered_json index = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < plan.size(); ++k) {
      nlohmann::ordered_json row;
      row["combination"] = plan[k].problem_index;
      nlohmann::ordered_json ov = nlohmann::ordered_json::object();
      for (const auto& [key, value] : overrides[k]) ov[key] = value;
      row["overrides"] = ov;
      row["seed"] = plan[k].seed;
      row["csv"] = outcomes[k].csv.filename().string();
      row["json"] = outcomes[k].json.filename().string();
      const auto& r = outcomes[k].result;
      row["final_loss"] = r.trace.empty() ? nlohmann::ordered_json(nullptr)
                                          : nlohmann::ordered_json(r.trace.back().loss);
      row["total_queries"] = r.total_queries;
      row["aborted"] = r.aborted;
      index.push_back(row);
    }
    write_text_file(base.output_dir / "sweep.json", index.dump(2) + "\n");
    return code;
  });
}

Prop1Report run_prop1(std::int64_t iterations, double alpha) {
  const auto started = std::chrono::steady_clock::now();
  const ProblemSpec problem = make_counterexample_lp();
  const Vector grad = problem.metadata.gradient(problem.initial, 0);

  auto variant = [&](bool euclidean) {
    OptConfig cfg = default_config(Algorithm::ZoAdaMM);
    cfg.beta1 = 0.0;
    cfg.beta2 = 0.0;
    cfg.alpha = alpha;
    cfg.gradient = GradientSource::Analytic;
    cfg.max_iterations = iterations;
    cfg.euclidean_projection_override = euclidean;
    Prop1Variant v;
    v.name = euclidean ? "euclidean" : "mahalanobis";
    v.objective.push_back(problem.objective.evaluate_uncounted(problem.initial, 0));
    RunOptions options;
    options.approximate_measure = false;
    options.observer = [&](const IterationView& view) {
      v.iterates.push_back(view.x_after);
      v.objective.push_back(problem.objective.evaluate_uncounted(view.x_after, 0));
    };
    std::streambuf* saved = std::cerr.rdbuf(nullptr);
    RunResult result;
    try {
      result = run_optimizer(problem, cfg, 1, options);
    } catch (...) {
      std::cerr.rdbuf(saved);
      throw;
    }
    std::cerr.rdbuf(saved);
    v.final_x = result.final_x;
    return v;
  };

  Prop1Report report;
  report.euclidean = variant(true);
  report.mahalanobis = variant(false);

  {
    auto& e = report.euclidean;
    double worst = 0.0;
    for (const auto& x : e.iterates) worst = std::max(worst, (x.array() - 0.5).abs().maxCoeff());
    e.pass = static_cast<std::int64_t>(e.iterates.size()) == iterations && worst <= 1e-12;
    e.detail = "max |x_t - [0.5, 0.5]| over " + std::to_string(e.iterates.size()) +
               " iterations = " + format_double(worst);
  }
  {
    auto& m = report.mahalanobis;
    bool ok = static_cast<std::int64_t>(m.iterates.size()) == iterations && !m.iterates.empty();
    double first_err = 0.0;
    if (ok) {
      const Vector expected = (Vector(2) << 0.5 + alpha / 3.0, 0.5 - alpha / 3.0).finished();
      first_err = (m.iterates.front() - expected).cwiseAbs().maxCoeff();
      ok = first_err <= 1e-12;
    }
    double prev_x1 = 0.5;
    double worst_band = 0.0;
    bool monotone = true;
    for (std::size_t k = 0; k < m.iterates.size(); ++k) {
      const Vector& x = m.iterates[k];
      worst_band = std::max(worst_band, std::abs(x[0] + x[1]));
      monotone = monotone && x[0] > prev_x1 && m.objective[k + 1] < m.objective[k];
      prev_x1 = x[0];
    }
    m.pass = ok && monotone && worst_band <= 1.0 + 1e-12;
    m.detail = "first step error " + format_double(first_err) + ", x1 and objective " +
               (monotone ? "strictly monotone" : "NOT monotone") + ", max |x1 + x2| = " +
               format_double(worst_band);
  }
  const Vector probe = (Vector(2) << 0.6, 0.4).finished();
  report.vi_witness = vi_violation(grad, report.euclidean.final_x, probe);
  report.vi_pass = std::abs(report.vi_witness + 0.1) <= 1e-12;
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

int cmd_prop1(std::ostream& out) {
  const Prop1Report r = run_prop1();
  auto line = [&out](const Prop1Variant& v) {
    out << (v.pass ? "PASS " : "FAIL ") << v.name << " projection: final x = "
        << vector_text(v.final_x) << " (" << v.detail << ")\n";
  };
  line(r.euclidean);
  line(r.mahalanobis);
  out << (r.vi_pass ? "PASS " : "FAIL ") << "vi witness <grad f, [0.6, 0.4] - x> = "
      << format_double(r.vi_witness) << " at the euclidean fixed point\n";
  return r.pass() ? kExitOk : kExitPropertyFailure;
}

int cmd_validate(const std::string& suite, std::ostream& out, std::ostream& err,
                 std::optional<double> mu_floor) {
  return guarded(err, [&]() {
    ValidateOptions options;
    options.mu_floor = mu_floor;
    const auto results = run_validation(suite, options);
    const PropertyResult* first_failure = nullptr;
    for (const auto& r : results) {
      out << format_property(r) << "\n";
      if (!r.pass && !first_failure) first_failure = &r;
    }
    if (first_failure) {
      err << "first failing property: " << first_failure->suite << "/" << first_failure->name
          << "\n";
      return static_cast<int>(kExitPropertyFailure);
    }
    return static_cast<int>(kExitOk);
  });
}

std::string to_string(AttackScope s) { return s == AttackScope::PerImage ? "per-image" : "universal"; }

AttackScope parse_attack_scope(const std::string& name) {
  if (name == "per-image") return AttackScope::PerImage;
  if (name == "universal") return AttackScope::Universal;
  throw ConfigError("mode", "expected 'per-image' or 'universal', got '" + name + "'");
}

OptConfig attack_config(Algorithm a, AttackScope scope, std::size_t m) {
  OptConfig cfg = default_config(a);
  cfg.estimator.q = a == Algorithm::ZoNes ? 5 : 10;
  const bool per_image = scope == AttackScope::PerImage;
  cfg.estimator.b = per_image ? 1 : std::max<std::size_t>(1, m / 2);
  switch (a) {
    case Algorithm::ZoAdaMM:
      cfg.alpha = per_image ? 0.005 : 0.007;
      break;
    case Algorithm::ZoPsgd:
      cfg.alpha = per_image ? 0.05 : 0.02;
      break;
    case Algorithm::ZoNes:
      cfg.alpha = per_image ? 0.007 : 0.003;
      break;
    case Algorithm::ZoSmd:
      cfg.alpha = per_image ? 0.03 : 0.02;
      break;
    default:
      break;
  }
  return cfg;
}

double median(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("median: no values");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

AttackReport run_attack(const AttackRequest& request) {
  if (request.optimizers.empty()) throw ConfigError("opt", "needs at least one optimizer");
  if (request.budget == 0) throw ConfigError("budget", "must be positive");
  if (request.repeat == 0) throw ConfigError("repeat", "must be positive");

  TinyMlp model;
  LabeledInputs pinned;
  try {
    model = request.model_path.empty() ? make_victim_model() : load_mlp(request.model_path);
  } catch (const Error& e) {
    throw ConfigError("model", e.what());
  }
  try {
    if (request.inputs_path.empty()) {
      pinned = make_victim_inputs(model);
    } else {
      std::ifstream in(request.inputs_path);
      if (!in) throw IoError("cannot open inputs file " + request.inputs_path);
      pinned = inputs_from_json(nlohmann::json::parse(in));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("inputs", e.what());
  } catch (const Error& e) {
    throw ConfigError("inputs", e.what());
  }
  if (request.m < 1 || request.m > pinned.inputs.size()) {
    throw ConfigError("m", "must lie in [1, " + std::to_string(pinned.inputs.size()) + "]");
  }

  // One problem per attacked image set.
  std::vector<ProblemSpec> problems;
  std::vector<std::size_t> problem_image;
  if (request.scope == AttackScope::PerImage) {
    for (std::size_t i = 0; i < request.m; ++i) {
      problems.push_back(make_attack_problem(model, {pinned.inputs[i]}, {pinned.labels[i]},
                                             request.options));
      problem_image.push_back(i);
    }
  } else {
    std::vector<Vector> images(pinned.inputs.begin(), pinned.inputs.begin() + request.m);
    std::vector<std::size_t> labels(pinned.labels.begin(), pinned.labels.begin() + request.m);
    problems.push_back(make_attack_problem(model, images, labels, request.options));
    problem_image.push_back(0);
  }
  for (Algorithm a : request.optimizers) {
    validate_config(problems.front(), attack_config(a, request.scope, request.m), request.budget);
  }
  if (request.write_files) ensure_directory(request.out_dir);

  struct Job {
    std::size_t opt;
    std::uint64_t seed;
    std::size_t problem;
  };
  struct JobResult {
    RunResult run;
    std::size_t best_simultaneous = 0;
    std::optional<std::uint64_t> first_success_queries;
    double final_distortion = 0.0;
  };
  std::vector<Job> jobs;
  for (std::size_t o = 0; o < request.optimizers.size(); ++o) {
    for (std::uint64_t s = 0; s < request.repeat; ++s) {
      for (std::size_t p = 0; p < problems.size(); ++p) jobs.push_back({o, request.seed + s, p});
    }
  }
  std::vector<JobResult> results(jobs.size());
  std::atomic<std::size_t> aborted_runs{0};
  parallel_for(jobs.size(), worker_count(request.threads), [&](std::size_t k) {
    const Job& job = jobs[k];
    const ProblemSpec& problem = problems[job.problem];
    OptConfig cfg = attack_config(request.optimizers[job.opt], request.scope, request.m);
    cfg.seed = job.seed;
    JobResult& out = results[k];
    RunOptions options;
    options.observer = [&](const IterationView& view) {
      const auto flags = problem.attack.image_success(view.x_after);
      const auto fooled = static_cast<std::size_t>(std::count(flags.begin(), flags.end(), true));
      out.best_simultaneous = std::max(out.best_simultaneous, fooled);
      if (fooled == flags.size() && !out.first_success_queries) out.first_success_queries = view.queries;
    };
    out.run = run_optimizer(problem, cfg, request.budget, options);
    out.final_distortion = problem.attack.distortion(out.run.final_x);
    if (out.run.aborted) aborted_runs++;
    if (request.write_files) {
      std::string stem = to_string(request.scope) + "_" + to_string(cfg.algorithm) + "_seed" +
                         std::to_string(job.seed);
      stem += request.scope == AttackScope::PerImage
                  ? "_img" + std::to_string(problem_image[job.problem])
                  : "_m" + std::to_string(request.m);
      serialize_csv(out.run, request.out_dir / (stem + ".csv"));
    }
  });

  AttackReport report;
  report.request = request;
  report.aborted_runs = aborted_runs.load();
  for (std::size_t o = 0; o < request.optimizers.size(); ++o) {
    AttackOptimizerSummary summary;
    summary.algorithm = request.optimizers[o];
    std::vector<double> successes, distortions, queries;
    for (std::uint64_t s = 0; s < request.repeat; ++s) {
      AttackSeedSummary seed_summary;
      seed_summary.seed = request.seed + s;
      std::vector<double> seed_distortion, seed_queries;
      for (std::size_t k = 0; k < jobs.size(); ++k) {
        if (jobs[k].opt != o || jobs[k].seed != seed_summary.seed) continue;
        const JobResult& r = results[k];
        seed_distortion.push_back(r.final_distortion);
        if (request.scope == AttackScope::PerImage) {
          seed_summary.images += 1;
          if (r.first_success_queries) {
            seed_summary.successes += 1;
            seed_queries.push_back(static_cast<double>(*r.first_success_queries));
          }
        } else {
          seed_summary.images = request.m;
          seed_summary.successes = r.best_simultaneous;
          if (r.first_success_queries) seed_queries.push_back(static_cast<double>(*r.first_success_queries));
        }
      }
      seed_summary.median_final_distortion = median(seed_distortion);
      if (!seed_queries.empty()) seed_summary.median_first_success_queries = median(seed_queries);
      successes.push_back(static_cast<double>(seed_summary.successes));
      distortions.push_back(seed_summary.median_final_distortion);
      if (seed_summary.median_first_success_queries) {
        queries.push_back(*seed_summary.median_first_success_queries);
      }
      summary.seeds.push_back(seed_summary);
    }
    summary.median_successes = median(successes);
    summary.median_final_distortion = median(distortions);
    if (!queries.empty()) summary.median_first_success_queries = median(queries);
    report.optimizers.push_back(std::move(summary));
  }
  return report;
}

nlohmann::ordered_json attack_report_json(const AttackReport& report) {
  const AttackRequest& q = report.request;
  nlohmann::ordered_json j;
  nlohmann::ordered_json req;
  req["mode"] = to_string(q.scope);
  req["m"] = q.m;
  auto names = nlohmann::ordered_json::array();
  for (Algorithm a : q.optimizers) names.push_back(to_string(a));
  req["optimizers"] = names;
  req["budget"] = q.budget;
  req["seed"] = q.seed;
  req["repeat"] = q.repeat;
  req["formulation"] = to_string(q.options.mode);
  req["lambda"] = q.options.lambda;
  req["kappa"] = q.options.kappa;
  req["model"] = q.model_path;
  req["inputs"] = q.inputs_path;
  j["request"] = req;

  auto opt_rows = nlohmann::ordered_json::array();
  for (const auto& s : report.optimizers) {
    nlohmann::ordered_json row;
    row["optimizer"] = to_string(s.algorithm);
    const OptConfig cfg = attack_config(s.algorithm, q.scope, q.m);
    row["alpha"] = cfg.alpha;
    row["b"] = cfg.estimator.b;
    row["q"] = cfg.estimator.q;
    row["median_successes"] = s.median_successes;
    row["median_first_success_queries"] =
        s.median_first_success_queries ? nlohmann::ordered_json(*s.median_first_success_queries)
                                       : nlohmann::ordered_json(nullptr);
    row["median_final_distortion"] = s.median_final_distortion;
    auto seeds = nlohmann::ordered_json::array();
    for (const auto& ss : s.seeds) {
      nlohmann::ordered_json sj;
      sj["seed"] = ss.seed;
      sj["images"] = ss.images;
      sj["successes"] = ss.successes;
      sj["success_rate"] = static_cast<double>(ss.successes) / static_cast<double>(ss.images);
      sj["median_first_success_queries"] =
          ss.median_first_success_queries ? nlohmann::ordered_json(*ss.median_first_success_queries)
                                          : nlohmann::ordered_json(nullptr);
      sj["median_final_distortion"] = ss.median_final_distortion;
      seeds.push_back(sj);
    }
    row["seeds"] = seeds;
    opt_rows.push_back(row);
  }
  j["optimizers"] = opt_rows;
  return j;
}

std::string attack_report_text(const AttackReport& report) {
  const AttackRequest& q = report.request;
  std::ostringstream os;
  os << "attack " << to_string(q.scope) << "  m=" << q.m << "  budget=" << q.budget
     << "  seeds=" << q.seed << ".." << (q.seed + q.repeat - 1) << "\n";
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-12s %10s %14s %16s\n", "optimizer", "successes",
                "median_queries", "median_distortion");
  os << buf;
  for (const auto& s : report.optimizers) {
    const std::size_t images = s.seeds.empty() ? 0 : s.seeds.front().images;
    std::snprintf(buf, sizeof buf, "%-12s %6s/%-3zu %14s %16.6g\n", to_string(s.algorithm).c_str(),
                  format_double(s.median_successes).c_str(), images,
                  s.median_first_success_queries
                      ? format_double(*s.median_first_success_queries).c_str()
                      : "-",
                  s.median_final_distortion);
    os << buf;
  }
  return os.str();
}

int cmd_attack(const AttackRequest& request, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() {
    const AttackReport report = run_attack(request);
    const std::string text = attack_report_text(report);
    const std::string stem = "attack_" + to_string(request.scope) + "_summary";
    write_text_file(request.out_dir / (stem + ".json"), attack_report_json(report).dump(2) + "\n");
    write_text_file(request.out_dir / (stem + ".txt"), text);
    out << text;
    if (report.aborted_runs > 0) {
      err << report.aborted_runs << " attack run(s) stopped on a numeric error\n";
      return static_cast<int>(kExitNumericAbort);
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_export_victim(const std::filesystem::path& out_dir, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() {
    ensure_directory(out_dir);
    const TinyMlp model = make_victim_model();
    save_mlp(model, out_dir / kVictimModelFile);
    write_text_file(out_dir / kVictimInputsFile,
                    inputs_to_json(make_victim_inputs(model)).dump(2) + "\n");
    out << "wrote " << (out_dir / kVictimModelFile).string() << " and "
        << (out_dir / kVictimInputsFile).string() << "\n";
    return static_cast<int>(kExitOk);
  });
}

}  // namespace zoopt
