#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "zoopt/estimators.hpp"
#include "zoopt/geometry.hpp"
#include "zoopt/metrics.hpp"
#include "zoopt/problem_spec.hpp"

namespace zoopt {

enum class Algorithm { ZoAdaMM, ZoSgd, ZoSignSgd, ZoScd, ZoPsgd, ZoSmd, ZoNes };

enum class StepSchedule { Constant, InverseSqrt };

/// mu_t: constant mu0, mu0 / sqrt(T d), or mu0 / (d t).
enum class SmoothingSchedule { Constant, InverseSqrtTd, InverseDt };

/// beta_{1,t}: constant beta1 or beta1 / t.
enum class MomentumSchedule { Constant, InverseT };

/// Where g_hat comes from. Analytic substitutes the exact (per-sample) gradient
/// and consumes no queries; the run is then bounded by `max_iterations`.
enum class GradientSource { Estimator, Analytic };

std::string to_string(Algorithm a);
std::string to_string(StepSchedule s);
std::string to_string(SmoothingSchedule s);
std::string to_string(MomentumSchedule s);
std::string to_string(GradientSource s);
std::string to_string(DirectionKind k);
Algorithm parse_algorithm(const std::string& name);
StepSchedule parse_step_schedule(const std::string& name);
SmoothingSchedule parse_smoothing_schedule(const std::string& name);
MomentumSchedule parse_momentum_schedule(const std::string& name);
GradientSource parse_gradient_source(const std::string& name);
DirectionKind parse_direction(const std::string& name);

/// True for the methods that only handle X = R^d (ZO-SGD, ZO-signSGD, ZO-SCD).
bool requires_unconstrained(Algorithm a);

struct OptConfig {
  Algorithm algorithm = Algorithm::ZoAdaMM;
  double beta1 = 0.9;
  double beta2 = 0.3;
  double alpha = 0.01;
  StepSchedule alpha_schedule = StepSchedule::InverseSqrt;
  SmoothingSchedule mu_schedule = SmoothingSchedule::InverseSqrtTd;
  MomentumSchedule beta1_schedule = MomentumSchedule::Constant;
  double v0 = 1e-5;
  double vhat0 = 1e-5;
  bool use_vhat_max = true;
  /// mu here is the schedule's base value mu0.
  EstimatorConfig estimator{.mu = 1.0};
  /// Coordinates per iteration for ZO-SCD.
  std::size_t scd_coords = 5;
  GradientSource gradient = GradientSource::Estimator;
  /// Replaces the Mahalanobis projection of ZO-AdaMM with the Euclidean one.
  /// Only exists to reproduce the non-convergence counterexample.
  bool euclidean_projection_override = false;
  std::int64_t max_iterations = 0;  // 0 = bounded by the query budget only
  std::uint64_t seed = 1;
  /// Record every n-th iteration; 0 picks 1 for runs up to 2000 iterations, else 10.
  std::int64_t trace_stride = 0;
};

/// Defaults per method: decaying alpha_t = alpha / sqrt(t) for all, mu per the
/// method's smoothing column (1/sqrt(Td) for most, 1/(dt) for ZO-SMD).
OptConfig default_config(Algorithm a);

/// gamma = beta1 / beta2 when beta2 > 0.
std::optional<double> momentum_ratio(const OptConfig& cfg);

double step_size(const OptConfig& cfg, std::int64_t t);
double smoothing_radius(const OptConfig& cfg, std::int64_t t, std::int64_t horizon, Index d);
double momentum_beta1(const OptConfig& cfg, std::int64_t t);

/// Queries consumed by one iteration.
std::uint64_t iteration_cost(const OptConfig& cfg);

struct AdaMMState {
  Vector m;
  Vector v;
  Vector v_hat;
  std::int64_t t = 0;

  static AdaMMState initial(Index d, const OptConfig& cfg);
};

struct AdaMMStep {
  AdaMMState state;
  Vector x;
  /// V_hat^{-1/2} m, with 0 where v_hat is 0.
  Vector direction;
  double alpha_t;
};

/// One iteration of the adaptive-momentum update with projection under the
/// metric h = sqrt(v_hat) (or the Euclidean one when overridden).
AdaMMStep zo_adamm_step(const AdaMMState& state, const Vector& x, const Vector& g_hat,
                        const OptConfig& cfg, const ConstraintSet& set);

Vector zo_sgd_step(const Vector& x, const Vector& g_hat, double alpha_t, const ConstraintSet& set,
                   bool projected);
Vector zo_signsgd_step(const Vector& x, const Vector& g_hat, double alpha_t,
                       const ConstraintSet& set, bool projected);
Vector zo_smd_step(const Vector& x, const Vector& g_hat, double alpha_t, const ConstraintSet& set);
Vector zo_scd_step(const Vector& x, const Vector& sparse_estimate, double alpha_t);

/// Everything an observer can see after one iteration.
struct IterationView {
  std::int64_t t;
  const Vector& x_before;
  const Vector& x_after;
  const Vector& g_hat;
  const Vector& direction;
  const AdaMMState* adamm;  // null for the other methods
  const std::vector<SampleIndex>& batch;
  double alpha_t;
  double mu_t;
  std::uint64_t queries;
};

struct RunOptions {
  std::function<void(const IterationView&)> observer;
  /// Approximate measure_m with a full-batch q=200 estimator when no analytic
  /// gradient is available.
  bool approximate_measure = true;
  std::size_t measure_directions = 200;
};

/// Runs until the next iteration would exceed `query_budget` (or
/// `max_iterations`). Configuration problems throw ConfigError before the first
/// iteration; numeric failures stop the run and are reported through
/// `RunResult::aborted` with the partial trace kept.
RunResult run_optimizer(const ProblemSpec& problem, const OptConfig& cfg,
                        std::uint64_t query_budget, const RunOptions& options = {});

/// Throws ConfigError if the configuration cannot run on the problem.
void validate_config(const ProblemSpec& problem, const OptConfig& cfg, std::uint64_t query_budget);

}  // namespace zoopt
