#include "zoopt/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "zoopt/errors.hpp"
#include "zoopt/estimators.hpp"
#include "zoopt/geometry.hpp"
#include "zoopt/optimizers.hpp"
#include "zoopt/problems.hpp"
#include "zoopt/smoothing.hpp"

namespace zoopt {

namespace {

PropertyResult check_le(const std::string& suite, const std::string& name, double measured,
                        double bound, std::string detail = {}) {
  return {suite, name, measured <= bound, measured, bound, std::move(detail)};
}

Vector uniform_in(Index d, double lo, double hi, RngStream& rng) {
  Vector v(d);
  for (Index i = 0; i < d; ++i) v[i] = lo + (hi - lo) * rng.uniform();
  return v;
}

StochasticObjective diagonal_quadratic(const Vector& a, const Vector& b) {
  return StochasticObjective(a.size(), SampleSpace::deterministic(),
                             [a, b](const Vector& x, SampleIndex) {
                               double acc = 0.0;
                               for (Index i = 0; i < x.size(); ++i) {
                                 acc += 0.5 * a[i] * x[i] * x[i] + b[i] * x[i];
                               }
                               return acc;
                             });
}

// Smoothing bounds at `points` on one objective with known constants.
struct SmoothingCase {
  std::string label;
  StochasticObjective obj;
  std::function<Vector(const Vector&, SampleIndex)> grad;
  double lipschitz;
  double gradient_lipschitz;
  std::vector<Vector> points;
  std::vector<SampleIndex> samples;
};

void smoothing_case(const SmoothingCase& c, const SmoothingProbe& probe,
                    std::vector<PropertyResult>& out) {
  const double mu = probe.mu;
  const double d = static_cast<double>(c.obj.dim());
  double worst_a1 = -1e300, worst_a2 = -1e300, worst_a3 = -1e300, worst_a6 = -1e300;
  for (std::size_t k = 0; k < c.points.size(); ++k) {
    const Vector& x = c.points[k];
    const SampleIndex xi = c.samples[k];
    SmoothingProbe p = probe;
    p.seed = probe.seed + k;
    const auto value = smooth_value_mc(c.obj, x, xi, p);
    const auto grad = smooth_grad_mc(c.obj, x, xi, p);
    const double f = c.obj.evaluate_uncounted(x, xi);
    const Vector g = c.grad(x, xi);
    const double gap = std::abs(value.mean - f) - 4.0 * value.std_error;
    worst_a1 = std::max(worst_a1, gap / (c.lipschitz * mu));
    worst_a2 = std::max(worst_a2, gap / (c.gradient_lipschitz * mu * mu / 2.0));
    const double grad_gap = norm(Vector(grad.mean - g)) - 4.0 * norm(grad.std_error);
    worst_a3 = std::max(worst_a3, grad_gap / (mu * d * c.gradient_lipschitz / 2.0));
    const double second_bound =
        2.0 * d * squared_norm(g) + mu * mu * c.gradient_lipschitz * c.gradient_lipschitz * d * d / 2.0;
    worst_a6 = std::max(worst_a6,
                        (grad.second_moment - 4.0 * grad.second_moment_std_error) / second_bound);
  }
  out.push_back(check_le("smoothing", c.label + ".value_lipschitz", worst_a1, 1.0,
                         "max (|f_mu - f| - 4se) / (L_c mu)"));
  out.push_back(check_le("smoothing", c.label + ".value_smooth", worst_a2, 1.0,
                         "max (|f_mu - f| - 4se) / (L_g mu^2 / 2)"));
  out.push_back(check_le("smoothing", c.label + ".gradient_bias", worst_a3, 1.0,
                         "max (||grad f_mu - grad f|| - 4se) / (mu d L_g / 2)"));
  out.push_back(check_le("smoothing", c.label + ".second_moment", worst_a6, 1.0,
                         "max (E||g||^2 - 4se) / (2d||grad f||^2 + mu^2 L_g^2 d^2 / 2)"));
}

std::vector<PropertyResult> smoothing_suite(const ValidateOptions& options) {
  std::vector<PropertyResult> out;
  SmoothingProbe probe;
  probe.mu = 0.05;
  probe.samples = 20000;
  probe.seed = options.seed;
  if (options.mu_floor) probe.mu_floor = *options.mu_floor;
  constexpr int kPoints = 20;

  {
    const Index d = 5;
    RngStream rng(options.seed, 1);
    const Vector a = quadratic_curvature(d, 4.0);
    const Vector b = uniform_in(d, -1.0, 1.0, rng);
    // Points in the unit ball; the Lipschitz constant holds on the ball of radius 1 + mu.
    const double lc = a.maxCoeff() * (1.0 + probe.mu) + norm(b);
    SmoothingCase c{"quadratic", diagonal_quadratic(a, b),
                    [a, b](const Vector& x, SampleIndex) { return Vector(a.cwiseProduct(x) + b); },
                    lc, a.maxCoeff(), {}, {}};
    for (int k = 0; k < kPoints; ++k) {
      c.points.push_back(sample_unit_ball(d, rng));
      c.samples.push_back(0);
    }
    smoothing_case(c, probe, out);
  }
  {
    const ProblemSpec logistic = make_logistic(50, 10, options.seed);
    RngStream rng(options.seed, 2);
    SmoothingCase c{"logistic", logistic.objective, logistic.metadata.gradient,
                    *logistic.metadata.lipschitz, *logistic.metadata.gradient_lipschitz, {}, {}};
    for (int k = 0; k < kPoints; ++k) {
      c.points.push_back(5.0 * sample_unit_ball(10, rng));
      c.samples.push_back(rng.below(50));
    }
    smoothing_case(c, probe, out);
  }
  return out;
}

std::vector<PropertyResult> estimators_suite(const ValidateOptions& options) {
  std::vector<PropertyResult> out;
  {
    const Index d = 10;
    const ProblemSpec quad = make_quadratic(d, 10.0, options.seed);
    RngStream rng(options.seed, 3);
    const Vector x = uniform_in(d, -1.0, 1.0, rng);
    SmoothingProbe probe;
    probe.mu = 0.01;
    probe.samples = 20000;
    probe.seed = options.seed;
    const auto mc = smooth_grad_mc(quad.objective, x, 0, probe);
    const Vector exact = quad.metadata.gradient(x, 0);
    double worst = 0.0;
    for (Index i = 0; i < d; ++i) worst = std::max(worst, std::abs(mc.mean[i] - exact[i]) / mc.std_error[i]);
    out.push_back(check_le("estimators", "unbiased", worst, 4.0, "max |mean - grad f_mu| / se"));
  }
  {
    const Index d = 50;
    const ProblemSpec quad = make_quadratic(d, 10.0, options.seed);
    RngStream rng(options.seed, 4);
    const Vector x = uniform_in(d, -1.0, 1.0, rng);
    constexpr int kReps = 2000;
    std::vector<double> variance;
    for (std::size_t q : {1u, 2u, 4u, 8u}) {
      Vector mean = Vector::Zero(d);
      std::vector<Vector> draws;
      for (int r = 0; r < kReps; ++r) {
        draws.push_back(averaged_estimator_on_batch(quad.objective, x, {0}, 1e-4, q, rng));
        mean += draws.back();
      }
      mean /= kReps;
      double acc = 0.0;
      for (const auto& g : draws) acc += squared_norm(Vector(g - mean));
      variance.push_back(acc / (kReps - 1));
    }
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < variance.size(); ++k) {
      worst = std::max(worst, std::abs(variance[k] / variance[k + 1] / 2.0 - 1.0));
    }
    out.push_back(check_le("estimators", "variance_halving_q", worst, 0.25,
                           "max |var(q) / var(2q) / 2 - 1|"));
  }
  {
    const ProblemSpec quad = make_quadratic(8, 10.0, options.seed, 64, 1.0);
    RngStream rng(options.seed, 5);
    const Vector x = Vector::Zero(8);
    const auto before = quad.objective.queries();
    averaged_estimator(quad.objective, x, 0.01, 3, 4, rng);
    const double used = static_cast<double>(quad.objective.queries() - before);
    out.push_back({"estimators", "query_count_averaged", used == 15.0, used, 15.0, "b (q + 1)"});
    const auto before_coord = quad.objective.queries();
    coordinate_estimate(quad.objective, x, 0, 0.01, {0, 3, 5});
    const double coord_used = static_cast<double>(quad.objective.queries() - before_coord);
    out.push_back({"estimators", "query_count_coordinate", coord_used == 6.0, coord_used, 6.0,
                   "2 |coords|"});
  }
  {
    const ProblemSpec quad = make_quadratic(6, 3.0, options.seed);
    RngStream rng(options.seed, 6);
    const Vector x = uniform_in(6, -1.0, 1.0, rng);
    RngStream r1 = rng, r2 = rng;
    const Vector single = two_point_uniform(quad.objective, x, 0, 0.01, r1);
    const Vector averaged = averaged_estimator_on_batch(quad.objective, x, {0}, 0.01, 1, r2);
    const double diff = (single - averaged).cwiseAbs().maxCoeff();
    out.push_back({"estimators", "averaged_reduces_to_two_point", diff == 0.0, diff, 0.0,
                   "b = q = 1"});
  }
  return out;
}

std::vector<PropertyResult> geometry_suite(const ValidateOptions& options) {
  std::vector<PropertyResult> out;
  RngStream rng(options.seed, 7);
  {
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const Index d = 2 + static_cast<Index>(rng.below(5));
      const Vector a = uniform_in(d, -2.0, 2.0, rng);
      const double b = 0.1 + rng.uniform();
      const Vector h = uniform_in(d, 0.1, 10.0, rng);
      const Vector y = uniform_in(d, -3.0, 3.0, rng);
      const Vector fast =
          project_mahalanobis(ConstraintSet::symmetric_band(a, b), DiagonalMetric(h), y);
      const Vector slow = brute_force_band_projection(a, b, h, y);
      worst = std::max(worst, (fast - slow).cwiseAbs().maxCoeff());
    }
    out.push_back(check_le("geometry", "band_matches_brute_force", worst, 1e-6,
                           "max |closed form - brute force|"));
  }
  {
    bool exact = true;
    for (int k = 0; k < 1000; ++k) {
      const Index d = 1 + static_cast<Index>(rng.below(8));
      const Vector lo = uniform_in(d, -2.0, 0.0, rng);
      const Vector hi = lo + uniform_in(d, 0.0, 2.0, rng);
      const Vector h = uniform_in(d, 0.01, 100.0, rng);
      const Vector y = uniform_in(d, -4.0, 4.0, rng);
      const Vector p = project_mahalanobis(ConstraintSet::box(lo, hi), DiagonalMetric(h), y);
      exact = exact && p == y.cwiseMax(lo).cwiseMin(hi);
    }
    out.push_back({"geometry", "box_is_clamp", exact, exact ? 0.0 : 1.0, 0.0, "bitwise"});
  }
  {
    double worst_idem = 0.0;
    double worst_feas = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const Index d = 1 + static_cast<Index>(rng.below(8));
      ConstraintSet set;
      switch (k % 3) {
        case 0: {
          const Vector lo = uniform_in(d, -2.0, 0.0, rng);
          set = ConstraintSet::box(lo, lo + uniform_in(d, 0.0, 2.0, rng));
          break;
        }
        case 1: {
          Vector a = uniform_in(d, -2.0, 2.0, rng);
          a[0] = 0.5 + rng.uniform();
          set = ConstraintSet::symmetric_band(a, 0.1 + rng.uniform());
          break;
        }
        default:
          set = ConstraintSet::l2_ball(uniform_in(d, -1.0, 1.0, rng), 0.1 + 2.0 * rng.uniform());
      }
      const DiagonalMetric metric(uniform_in(d, 0.1, 10.0, rng));
      const Vector y = uniform_in(d, -4.0, 4.0, rng);
      const Vector p = project_mahalanobis(set, metric, y);
      const Vector pp = project_mahalanobis(set, metric, p);
      worst_idem = std::max(worst_idem, (p - pp).cwiseAbs().maxCoeff());
      if (!is_member(set, p)) worst_feas = std::max(worst_feas, 1.0);
    }
    out.push_back(check_le("geometry", "idempotent", worst_idem, 1e-12, "max |P(P(y)) - P(y)|"));
    out.push_back(check_le("geometry", "feasible", worst_feas, 0.0, "infeasible projections"));
  }
  {
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const Index d = 1 + static_cast<Index>(rng.below(8));
      const Vector h = uniform_in(d, 0.1, 10.0, rng);
      const Vector g = uniform_in(d, -3.0, 3.0, rng);
      const Vector x = uniform_in(d, -3.0, 3.0, rng);
      const Vector p =
          gradient_mapping(ConstraintSet::unconstrained(), DiagonalMetric(h), x, g, 0.3);
      worst = std::max(worst, (p - g.cwiseQuotient(h)).cwiseAbs().maxCoeff());
    }
    out.push_back(check_le("geometry", "unconstrained_mapping", worst, 1e-12,
                           "max |P - g / h|"));
  }
  return out;
}

std::vector<PropertyResult> reductions_suite(const ValidateOptions& options) {
  std::vector<PropertyResult> out;
  const ProblemSpec quad = make_quadratic(10, 10.0, options.seed);
  constexpr std::int64_t kIterations = 500;

  auto trajectory = [&](const OptConfig& cfg) {
    std::vector<Vector> xs;
    RunOptions run;
    run.approximate_measure = false;
    run.observer = [&xs](const IterationView& v) { xs.push_back(v.x_after); };
    run_optimizer(quad, cfg, std::uint64_t{1} << 40, run);
    return xs;
  };

  OptConfig adamm = default_config(Algorithm::ZoAdaMM);
  adamm.beta1 = 0.0;
  adamm.beta2 = 1.0;
  adamm.v0 = 1.0;
  adamm.vhat0 = 1.0;
  adamm.max_iterations = kIterations;
  adamm.seed = options.seed;
  OptConfig sgd = default_config(Algorithm::ZoSgd);
  sgd.max_iterations = kIterations;
  sgd.seed = options.seed;
  const auto xa = trajectory(adamm);
  const auto xs = trajectory(sgd);
  double worst = xa.size() == xs.size() && xa.size() == kIterations ? 0.0 : 1e300;
  for (std::size_t k = 0; k < std::min(xa.size(), xs.size()); ++k) {
    worst = std::max(worst, (xa[k] - xs[k]).cwiseAbs().maxCoeff());
  }
  out.push_back(check_le("reductions", "adamm_equals_sgd", worst, 1e-12,
                         "max |x_adamm - x_sgd| over 500 iterations"));

  OptConfig sign_cfg = default_config(Algorithm::ZoAdaMM);
  sign_cfg.beta1 = 0.0;
  sign_cfg.beta2 = 0.0;
  sign_cfg.use_vhat_max = false;
  sign_cfg.max_iterations = kIterations;
  sign_cfg.seed = options.seed;
  std::int64_t mismatches = 0;
  RunOptions run;
  run.approximate_measure = false;
  run.observer = [&mismatches](const IterationView& v) {
    if (v.direction != sign(v.g_hat)) ++mismatches;
  };
  run_optimizer(quad, sign_cfg, std::uint64_t{1} << 40, run);
  out.push_back(check_le("reductions", "adamm_direction_is_sign", static_cast<double>(mismatches),
                         0.0, "iterations with direction != sign(g)"));
  return out;
}

}  // namespace

const std::vector<std::string>& validation_suites() {
  static const std::vector<std::string> names{"smoothing", "estimators", "geometry", "reductions"};
  return names;
}

std::vector<PropertyResult> run_validation(const std::string& suite, const ValidateOptions& options) {
  if (suite == "all") {
    std::vector<PropertyResult> all;
    for (const auto& name : validation_suites()) {
      auto part = run_validation(name, options);
      all.insert(all.end(), part.begin(), part.end());
    }
    return all;
  }
  if (suite == "smoothing") return smoothing_suite(options);
  if (suite == "estimators") return estimators_suite(options);
  if (suite == "geometry") return geometry_suite(options);
  if (suite == "reductions") return reductions_suite(options);
  throw ConfigError("suite", "unknown validation suite '" + suite +
                                 "' (expected smoothing, estimators, geometry, reductions or all)");
}

std::string format_property(const PropertyResult& r) {
  char buf[64];
  std::string line = r.pass ? "PASS " : "FAIL ";
  line += r.suite + "/" + r.name;
  std::snprintf(buf, sizeof buf, " measured=%.6g", r.measured);
  line += buf;
  std::snprintf(buf, sizeof buf, " bound=%.6g", r.bound);
  line += buf;
  if (!r.detail.empty()) line += "  (" + r.detail + ")";
  return line;
}

Vector brute_force_band_projection(const Vector& a, double b, const Vector& h, const Vector& y) {
  require_same_dim(a, y, "brute_force_band_projection");
  require_same_dim(h, y, "brute_force_band_projection");
  const double ay = dot(a, y);
  if (std::abs(ay) <= b) return y;
  const double target = ay > 0.0 ? b : -b;
  const Index d = y.size();
  Index k = 0;
  for (Index i = 1; i < d; ++i) {
    if (std::abs(a[i]) > std::abs(a[k])) k = i;
  }

  Vector x = y;
  auto complete = [&](Vector& z) {
    double rest = 0.0;
    for (Index i = 0; i < d; ++i) {
      if (i != k) rest += a[i] * z[i];
    }
    z[k] = (target - rest) / a[k];
  };
  auto cost = [&](Vector z) {
    complete(z);
    return weighted_squared_distance(h, z, y);
  };
  complete(x);
  if (d == 1) return x;

  for (int sweep = 0; sweep < 200000; ++sweep) {
    double largest = 0.0;
    for (Index j = 0; j < d; ++j) {
      if (j == k) continue;
      Vector lo = x, hi = x;
      lo[j] -= 1.0;
      hi[j] += 1.0;
      const double f_lo = cost(lo), f_mid = cost(x), f_hi = cost(hi);
      const double curvature = f_lo - 2.0 * f_mid + f_hi;
      if (!(curvature > 0.0)) continue;
      const double step = (f_lo - f_hi) / (2.0 * curvature);
      x[j] += step;
      complete(x);
      largest = std::max(largest, std::abs(step));
    }
    if (largest < 1e-13) break;
  }
  return x;
}

}  // namespace zoopt
