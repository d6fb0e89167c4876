#include "zoopt/optimizers.hpp"

#include <algorithm>
#include <chrono>
#include <iostream>
#include <limits>
#include <numeric>

namespace zoopt {

namespace {

struct NamedAlgorithm {
  Algorithm algorithm;
  const char* name;
};

constexpr NamedAlgorithm kAlgorithms[] = {
    {Algorithm::ZoAdaMM, "zo-adamm"}, {Algorithm::ZoSgd, "zo-sgd"},
    {Algorithm::ZoSignSgd, "zo-signsgd"}, {Algorithm::ZoScd, "zo-scd"},
    {Algorithm::ZoPsgd, "zo-psgd"}, {Algorithm::ZoSmd, "zo-smd"},
    {Algorithm::ZoNes, "zo-nes"},
};

// Stream id of the metric-side generator.
constexpr std::uint64_t kMetricStream = 0x6d6574726963ull;

void require_unit_interval(double v, const char* key) {
  if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(key, "must lie in [0, 1]");
}

void require_positive(double v, const char* key) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(key, "must be positive");
}

DiagonalMetric projection_metric(const Vector& v_hat) {
  return DiagonalMetric(v_hat.cwiseMax(std::numeric_limits<double>::min()).cwiseSqrt());
}

Vector batch_average(const std::vector<SampleIndex>& batch,
                     const std::function<Vector(SampleIndex)>& per_sample) {
  Vector acc = per_sample(batch.front());
  for (std::size_t j = 1; j < batch.size(); ++j) acc += per_sample(batch[j]);
  return acc / static_cast<double>(batch.size());
}

}  // namespace

std::string to_string(Algorithm a) {
  for (const auto& entry : kAlgorithms) {
    if (entry.algorithm == a) return entry.name;
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
  for (const auto& entry : kAlgorithms) {
    if (name == entry.name) return entry.algorithm;
  }
  throw ConfigError("optimizer.name", "unknown optimizer '" + name + "'");
}

std::string to_string(StepSchedule s) {
  return s == StepSchedule::Constant ? "constant" : "inverse-sqrt";
}

StepSchedule parse_step_schedule(const std::string& name) {
  if (name == "constant") return StepSchedule::Constant;
  if (name == "inverse-sqrt") return StepSchedule::InverseSqrt;
  throw ConfigError("optimizer.alpha_schedule", "unknown schedule '" + name + "'");
}

std::string to_string(SmoothingSchedule s) {
  switch (s) {
    case SmoothingSchedule::Constant:
      return "constant";
    case SmoothingSchedule::InverseSqrtTd:
      return "inverse-sqrt-Td";
    case SmoothingSchedule::InverseDt:
      return "inverse-dt";
  }
  return "unknown";
}

SmoothingSchedule parse_smoothing_schedule(const std::string& name) {
  if (name == "constant") return SmoothingSchedule::Constant;
  if (name == "inverse-sqrt-Td") return SmoothingSchedule::InverseSqrtTd;
  if (name == "inverse-dt") return SmoothingSchedule::InverseDt;
  throw ConfigError("optimizer.mu_schedule", "unknown schedule '" + name + "'");
}

std::string to_string(MomentumSchedule s) {
  return s == MomentumSchedule::Constant ? "constant" : "inverse-t";
}

MomentumSchedule parse_momentum_schedule(const std::string& name) {
  if (name == "constant") return MomentumSchedule::Constant;
  if (name == "inverse-t") return MomentumSchedule::InverseT;
  throw ConfigError("optimizer.beta1_schedule", "unknown schedule '" + name + "'");
}

std::string to_string(GradientSource s) {
  return s == GradientSource::Estimator ? "estimator" : "analytic";
}

GradientSource parse_gradient_source(const std::string& name) {
  if (name == "estimator") return GradientSource::Estimator;
  if (name == "analytic") return GradientSource::Analytic;
  throw ConfigError("optimizer.gradient", "expected 'estimator' or 'analytic', got '" + name + "'");
}

std::string to_string(DirectionKind k) { return k == DirectionKind::Sphere ? "sphere" : "gaussian"; }

DirectionKind parse_direction(const std::string& name) {
  if (name == "sphere") return DirectionKind::Sphere;
  if (name == "gaussian") return DirectionKind::Gaussian;
  throw ConfigError("optimizer.direction", "expected 'sphere' or 'gaussian', got '" + name + "'");
}

bool requires_unconstrained(Algorithm a) {
  return a == Algorithm::ZoSgd || a == Algorithm::ZoSignSgd || a == Algorithm::ZoScd;
}

OptConfig default_config(Algorithm a) {
  OptConfig cfg;
  cfg.algorithm = a;
  if (a == Algorithm::ZoSmd) cfg.mu_schedule = SmoothingSchedule::InverseDt;
  return cfg;
}

std::optional<double> momentum_ratio(const OptConfig& cfg) {
  if (cfg.beta2 > 0.0) return cfg.beta1 / cfg.beta2;
  return std::nullopt;
}

double step_size(const OptConfig& cfg, std::int64_t t) {
  if (t < 1) throw InvalidArgument("step_size: t must be >= 1");
  if (cfg.alpha_schedule == StepSchedule::Constant) return cfg.alpha;
  return cfg.alpha / std::sqrt(static_cast<double>(t));
}

double smoothing_radius(const OptConfig& cfg, std::int64_t t, std::int64_t horizon, Index d) {
  if (t < 1) throw InvalidArgument("smoothing_radius: t must be >= 1");
  const double mu0 = cfg.estimator.mu;
  const double dd = static_cast<double>(d);
  double mu = mu0;
  switch (cfg.mu_schedule) {
    case SmoothingSchedule::Constant:
      break;
    case SmoothingSchedule::InverseSqrtTd:
      mu = mu0 / std::sqrt(static_cast<double>(std::max<std::int64_t>(horizon, 1)) * dd);
      break;
    case SmoothingSchedule::InverseDt:
      mu = mu0 / (dd * static_cast<double>(t));
      break;
  }
  return std::max(mu, cfg.estimator.mu_floor);
}

double momentum_beta1(const OptConfig& cfg, std::int64_t t) {
  if (cfg.beta1_schedule == MomentumSchedule::Constant) return cfg.beta1;
  return cfg.beta1 / static_cast<double>(std::max<std::int64_t>(t, 1));
}

std::uint64_t iteration_cost(const OptConfig& cfg) {
  if (cfg.gradient == GradientSource::Analytic) return 0;
  const std::uint64_t b = cfg.estimator.b;
  const std::uint64_t q = cfg.estimator.q;
  switch (cfg.algorithm) {
    case Algorithm::ZoNes:
      return 2 * b * q;
    case Algorithm::ZoScd:
      return 2 * b * cfg.scd_coords;
    default:
      return b * (q + 1);
  }
}

AdaMMState AdaMMState::initial(Index d, const OptConfig& cfg) {
  return {Vector::Zero(d), Vector::Constant(d, cfg.v0), Vector::Constant(d, cfg.vhat0), 0};
}

AdaMMStep zo_adamm_step(const AdaMMState& state, const Vector& x, const Vector& g_hat,
                        const OptConfig& cfg, const ConstraintSet& set) {
  require_same_dim(x, g_hat, "zo_adamm_step");
  require_same_dim(state.m, x, "zo_adamm_step");
  const std::int64_t t = state.t + 1;
  if (!all_finite(g_hat)) {
    throw NumericError("zo_adamm_step: non-finite gradient estimate at iteration " +
                           std::to_string(t),
                       to_std(x), t);
  }
  const double b1 = momentum_beta1(cfg, t);
  const double b2 = cfg.beta2;
  const double alpha_t = step_size(cfg, t);

  AdaMMStep out{state, Vector(), Vector(x.size()), alpha_t};
  AdaMMState& s = out.state;
  s.t = t;
  s.m = b1 * state.m + (1.0 - b1) * g_hat;
  s.v = b2 * state.v + (1.0 - b2) * g_hat.cwiseProduct(g_hat);
  s.v_hat = cfg.use_vhat_max ? elementwise_max(state.v_hat, s.v) : s.v;

  for (Index i = 0; i < x.size(); ++i) {
    out.direction[i] = s.v_hat[i] > 0.0 ? s.m[i] / std::sqrt(s.v_hat[i]) : 0.0;
  }
  const Vector y = x - alpha_t * out.direction;
  if (set.is_unconstrained()) {
    out.x = y;
  } else if (cfg.euclidean_projection_override) {
    out.x = project_euclidean(set, y);
  } else {
    out.x = project_mahalanobis(set, projection_metric(s.v_hat), y);
  }
  if (!all_finite(out.x)) {
    throw NumericError("zo_adamm_step: non-finite iterate at iteration " + std::to_string(t),
                       to_std(x), t);
  }
  return out;
}

Vector zo_sgd_step(const Vector& x, const Vector& g_hat, double alpha_t, const ConstraintSet& set,
                   bool projected) {
  require_same_dim(x, g_hat, "zo_sgd_step");
  if (!projected && !set.is_unconstrained()) {
    throw ConfigError("optimizer.name", "unprojected step on a constrained problem");
  }
  const Vector y = x - alpha_t * g_hat;
  return projected ? project_euclidean(set, y) : y;
}

Vector zo_signsgd_step(const Vector& x, const Vector& g_hat, double alpha_t,
                       const ConstraintSet& set, bool projected) {
  return zo_sgd_step(x, sign(g_hat), alpha_t, set, projected);
}

Vector zo_smd_step(const Vector& x, const Vector& g_hat, double alpha_t, const ConstraintSet& set) {
  return zo_sgd_step(x, g_hat, alpha_t, set, true);
}

Vector zo_scd_step(const Vector& x, const Vector& sparse_estimate, double alpha_t) {
  require_same_dim(x, sparse_estimate, "zo_scd_step");
  return x - alpha_t * sparse_estimate;
}

void validate_config(const ProblemSpec& problem, const OptConfig& cfg, std::uint64_t query_budget) {
  const Index d = problem.objective.dim();
  require_unit_interval(cfg.beta1, "optimizer.beta1");
  require_unit_interval(cfg.beta2, "optimizer.beta2");
  require_positive(cfg.alpha, "optimizer.alpha");
  require_positive(cfg.estimator.mu, "optimizer.mu");
  require_positive(cfg.estimator.mu_floor, "optimizer.mu_floor");
  if (cfg.algorithm == Algorithm::ZoAdaMM) {
    require_positive(cfg.v0, "optimizer.v0");
    require_positive(cfg.vhat0, "optimizer.vhat0");
  }
  if (cfg.estimator.b < 1) throw ConfigError("optimizer.b", "must be >= 1");
  if (cfg.estimator.q < 1) throw ConfigError("optimizer.q", "must be >= 1");
  if (cfg.algorithm == Algorithm::ZoScd &&
      (cfg.scd_coords < 1 || cfg.scd_coords > static_cast<std::size_t>(d))) {
    throw ConfigError("optimizer.scd_coords", "must lie in [1, d]");
  }
  if (requires_unconstrained(cfg.algorithm) && !problem.constraint.is_unconstrained()) {
    throw ConfigError("optimizer.name", to_string(cfg.algorithm) +
                                            " handles unconstrained problems only, got a " +
                                            problem.constraint.name() + " constraint");
  }
  if (problem.objective.sample_space().kind == SampleSpace::Kind::Unbounded) {
    throw ConfigError("problem", "traces need a finite sample space");
  }
  if (problem.initial.size() != d) throw ConfigError("problem", "initial point dimension mismatch");
  if (!is_member(problem.constraint, problem.initial)) {
    throw ConfigError("problem", "initial point is infeasible");
  }
  if (cfg.max_iterations < 0) throw ConfigError("optimizer.max_iterations", "must be >= 0");
  if (cfg.gradient == GradientSource::Analytic) {
    if (!problem.metadata.has_gradient()) {
      throw ConfigError("optimizer.gradient", "problem has no analytic gradient");
    }
    if (cfg.max_iterations == 0) {
      throw ConfigError("optimizer.max_iterations", "required with analytic gradients");
    }
    return;
  }
  const std::uint64_t cost = iteration_cost(cfg);
  if (query_budget < cost) {
    throw ConfigError("query_budget", "budget " + std::to_string(query_budget) +
                                          " is below one iteration's cost of " +
                                          std::to_string(cost) + " queries");
  }
}

RunResult run_optimizer(const ProblemSpec& problem, const OptConfig& cfg,
                        std::uint64_t query_budget, const RunOptions& options) {
  validate_config(problem, cfg, query_budget);
  const auto started = std::chrono::steady_clock::now();

  StochasticObjective obj = problem.objective;
  obj.reset_queries();
  StochasticObjective metric_obj = problem.objective;
  const ConstraintSet& set = problem.constraint;
  const ProblemMetadata& meta = problem.metadata;
  const Index d = obj.dim();
  const std::uint64_t cost = iteration_cost(cfg);

  std::int64_t horizon = cost > 0 ? static_cast<std::int64_t>(query_budget / cost) : cfg.max_iterations;
  if (cfg.max_iterations > 0) horizon = std::min(horizon, cfg.max_iterations);
  const std::int64_t stride =
      cfg.trace_stride > 0 ? cfg.trace_stride : (horizon <= 2000 ? 1 : 10);

  RngStream rng(cfg.seed);
  RngStream metric_rng(cfg.seed, kMetricStream);

  if (cfg.algorithm == Algorithm::ZoAdaMM && cfg.euclidean_projection_override &&
      !set.is_unconstrained()) {
    std::cerr << "warning: zo-adamm running with Euclidean projection "
                 "(euclidean_projection_override); convergence is not guaranteed\n";
  }

  RunResult result;
  Vector x = problem.initial;
  AdaMMState state = AdaMMState::initial(d, cfg);

  std::vector<SampleIndex> all_samples(obj.sample_space().size);
  std::iota(all_samples.begin(), all_samples.end(), SampleIndex{0});

  auto record = [&](std::int64_t t) {
    TraceRecord r;
    r.iter = t;
    r.queries = obj.queries();
    r.loss = full_loss(obj, x);
    const double alpha = step_size(cfg, std::max<std::int64_t>(t, 1));
    const DiagonalMetric metric = cfg.algorithm == Algorithm::ZoAdaMM
                                      ? projection_metric(state.v_hat)
                                      : DiagonalMetric::identity(d);
    if (meta.has_gradient()) {
      const Vector grad = full_gradient(obj, meta, x);
      r.grad_norm_sq = squared_norm(grad);
      r.measure_m = mahalanobis_measure(set, metric, x, grad, alpha);
    } else if (options.approximate_measure) {
      const double mu = smoothing_radius(cfg, std::max<std::int64_t>(t, 1), horizon, d);
      const Vector grad = averaged_estimator_on_batch(metric_obj, x, all_samples, mu,
                                                      options.measure_directions, metric_rng,
                                                      DirectionKind::Sphere,
                                                      cfg.estimator.mu_floor);
      r.measure_m = mahalanobis_measure(set, metric, x, grad, alpha);
      result.measure_approx = true;
    }
    if (problem.attack) {
      r.distortion = problem.attack.distortion(x);
      const auto flags = problem.attack.image_success(x);
      r.success = std::all_of(flags.begin(), flags.end(), [](bool f) { return f; });
    }
    result.trace.push_back(r);
  };

  record(0);
  std::int64_t t = 0;
  std::int64_t last_recorded = 0;
  try {
    for (;;) {
      if (cfg.max_iterations > 0 && t >= cfg.max_iterations) break;
      if (cost > 0 && obj.queries() + cost > query_budget) break;
      const std::int64_t next = t + 1;
      const double mu_t = smoothing_radius(cfg, next, horizon, d);
      const double alpha_t = step_size(cfg, next);

      std::vector<Index> coords;
      if (cfg.algorithm == Algorithm::ZoScd && cfg.gradient == GradientSource::Estimator) {
        coords = sample_coordinates(d, cfg.scd_coords, rng);
      }
      const auto batch = sample_minibatch(obj, cfg.estimator.b, rng);

      Vector g;
      if (cfg.gradient == GradientSource::Analytic) {
        g = batch_average(batch, [&](SampleIndex xi) { return meta.gradient(x, xi); });
      } else if (cfg.algorithm == Algorithm::ZoScd) {
        g = batch_average(batch, [&](SampleIndex xi) {
          return coordinate_estimate(obj, x, xi, mu_t, coords, cfg.estimator.mu_floor);
        });
      } else if (cfg.algorithm == Algorithm::ZoNes) {
        g = batch_average(batch, [&](SampleIndex xi) {
          return nes_antithetic_estimate(obj, x, xi, mu_t, cfg.estimator.q, rng,
                                         cfg.estimator.mu_floor);
        });
      } else {
        g = averaged_estimator_on_batch(obj, x, batch, mu_t, cfg.estimator.q, rng,
                                        cfg.estimator.direction, cfg.estimator.mu_floor);
      }
      if (!all_finite(g)) {
        throw NumericError("non-finite gradient estimate at iteration " + std::to_string(next),
                           to_std(x), next);
      }

      Vector x_next;
      Vector direction;
      switch (cfg.algorithm) {
        case Algorithm::ZoAdaMM: {
          AdaMMStep step = zo_adamm_step(state, x, g, cfg, set);
          state = std::move(step.state);
          x_next = std::move(step.x);
          direction = std::move(step.direction);
          break;
        }
        case Algorithm::ZoSgd:
          x_next = zo_sgd_step(x, g, alpha_t, set, false);
          direction = g;
          break;
        case Algorithm::ZoPsgd:
          x_next = zo_sgd_step(x, g, alpha_t, set, true);
          direction = g;
          break;
        case Algorithm::ZoSmd:
          x_next = zo_smd_step(x, g, alpha_t, set);
          direction = g;
          break;
        case Algorithm::ZoSignSgd:
          x_next = zo_signsgd_step(x, g, alpha_t, set, false);
          direction = sign(g);
          break;
        case Algorithm::ZoNes:
          x_next = zo_signsgd_step(x, g, alpha_t, set, true);
          direction = sign(g);
          break;
        case Algorithm::ZoScd:
          x_next = zo_scd_step(x, g, alpha_t);
          direction = g;
          break;
      }
      if (!all_finite(x_next)) {
        throw NumericError("non-finite iterate at iteration " + std::to_string(next), to_std(x),
                           next);
      }

      t = next;
      if (options.observer) {
        options.observer(IterationView{t, x, x_next, g, direction,
                                       cfg.algorithm == Algorithm::ZoAdaMM ? &state : nullptr,
                                       batch, alpha_t, mu_t, obj.queries()});
      }
      x = std::move(x_next);
      if (t % stride == 0) {
        record(t);
        last_recorded = t;
      }
    }
    if (last_recorded != t) record(t);
  } catch (const NumericError& e) {
    result.aborted = true;
    result.abort_message = e.what();
  }

  result.iterations = t;
  result.final_x = x;
  result.total_queries = obj.queries();
  result.random_index = t > 0 ? 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(t))) : 0;
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace zoopt
