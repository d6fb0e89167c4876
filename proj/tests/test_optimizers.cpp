#include <doctest.h>

#include <cmath>

#include "zoopt/optimizers.hpp"
#include "zoopt/problems.hpp"

using namespace zoopt;

namespace {

const Algorithm kAll[] = {Algorithm::ZoAdaMM, Algorithm::ZoSgd,  Algorithm::ZoSignSgd, Algorithm::ZoScd,
                          Algorithm::ZoPsgd,  Algorithm::ZoSmd, Algorithm::ZoNes};

OptConfig seeded(Algorithm a, std::uint64_t seed = 3) {
  OptConfig cfg = default_config(a);
  cfg.seed = seed;
  return cfg;
}

ProblemSpec boxed_quadratic() {
  ProblemSpec p = make_quadratic(6, 10.0, 4);
  p.constraint = ConstraintSet::uniform_box(6, -0.2, 0.2);
  p.initial = Vector::Zero(6);
  return p;
}

}  // namespace

TEST_CASE("one adaptive step in one dimension") {
  OptConfig cfg;
  cfg.alpha = 0.1;
  cfg.alpha_schedule = StepSchedule::Constant;
  const AdaMMState s0 = AdaMMState::initial(1, cfg);
  const AdaMMStep step = zo_adamm_step(s0, Vector::Zero(1), Vector::Constant(1, 2.0), cfg,
                                       ConstraintSet::unconstrained());
  // Independent step-through: m = 0.1 * 2, v = 0.3 * 1e-5 + 0.7 * 4.
  const double m = 0.2;
  const double v = 0.3 * 1e-5 + 0.7 * 4.0;
  CHECK(step.state.m[0] == doctest::Approx(m).epsilon(1e-12));
  CHECK(step.state.v[0] == doctest::Approx(v).epsilon(1e-12));
  CHECK(step.state.v_hat[0] == step.state.v[0]);
  CHECK(std::abs(step.x[0] - (-0.1 * m / std::sqrt(v))) <= 1e-9);
  CHECK(std::abs(step.x[0] - (-0.011952279690338675)) <= 1e-9);
  CHECK(step.state.t == 1);
}

TEST_CASE("adaptive step reductions") {
  RngStream rng(5);
  SUBCASE("beta1 = 0, beta2 = 1, v0 = vhat0 = 1 is a plain gradient step") {
    OptConfig cfg;
    cfg.beta1 = 0.0;
    cfg.beta2 = 1.0;
    cfg.v0 = cfg.vhat0 = 1.0;
    AdaMMState s = AdaMMState::initial(4, cfg);
    Vector x = Vector::Zero(4);
    for (int t = 1; t <= 50; ++t) {
      const Vector g = sample_gaussian(4, rng);
      const AdaMMStep step = zo_adamm_step(s, x, g, cfg, ConstraintSet::unconstrained());
      REQUIRE(step.x == x - step_size(cfg, t) * g);
      s = step.state;
      x = step.x;
    }
  }
  SUBCASE("beta1 = beta2 = 0 without the max is a sign step") {
    OptConfig cfg;
    cfg.beta1 = cfg.beta2 = 0.0;
    cfg.use_vhat_max = false;
    AdaMMState s = AdaMMState::initial(5, cfg);
    for (int t = 1; t <= 50; ++t) {
      Vector g = sample_gaussian(5, rng);
      g[t % 5] = 0.0;
      const AdaMMStep step = zo_adamm_step(s, Vector::Zero(5), g, cfg, ConstraintSet::unconstrained());
      REQUIRE(step.direction == sign(g));
      s = step.state;
    }
  }
  CHECK_THROWS_AS(zo_adamm_step(AdaMMState::initial(2, OptConfig{}), Vector::Zero(2), Vector{{1.0, NAN}},
                                OptConfig{}, ConstraintSet::unconstrained()),
                  NumericError);
}

TEST_CASE("projected gradient step") {
  const ConstraintSet free = ConstraintSet::unconstrained();
  const Vector x{{0.3, -0.1}};
  CHECK(zo_sgd_step(x, Vector::Zero(2), 0.5, free, false) == x);
  const ConstraintSet box = ConstraintSet::uniform_box(2, -0.5, 0.5);
  const Vector out = zo_sgd_step(x, Vector{{-10.0, 10.0}}, 0.5, box, true);
  CHECK(out == Vector{{0.5, -0.5}});
  CHECK_THROWS_AS(zo_sgd_step(x, Vector::Zero(2), 0.5, box, false), ConfigError);

  const ProblemSpec quad = make_quadratic(5, 8.0, 2);
  Vector z = Vector::Constant(5, 2.0);
  double prev = quad.objective.evaluate_uncounted(z, 0);
  for (int t = 0; t < 100; ++t) {
    z = zo_sgd_step(z, quad.metadata.gradient(z, 0), 0.9 / 8.0, free, false);
    const double now = quad.objective.evaluate_uncounted(z, 0);
    REQUIRE(now < prev);
    prev = now;
  }
}

TEST_CASE("sign step") {
  const ConstraintSet band = ConstraintSet::symmetric_band(Vector{{1.0, 1.0}}, 1.0);
  const Vector x{{0.5, 0.5}};
  for (double a : {1e-4, 0.01, 0.5, 3.0}) {
    CHECK((zo_signsgd_step(x, Vector{{-2.0, -1.0}}, a, band, true) - x).cwiseAbs().maxCoeff() <= 1e-15);
  }
  const Vector y{{1.0, 2.0, 3.0}};
  CHECK(zo_signsgd_step(y, Vector{{0.1, 4.0, 1e-9}}, 0.25, ConstraintSet::unconstrained(), false) ==
        Vector{{0.75, 1.75, 2.75}});
  CHECK(zo_signsgd_step(y, Vector::Zero(3), 0.25, ConstraintSet::unconstrained(), false) == y);
}

TEST_CASE("mirror descent step and its schedule") {
  const ConstraintSet box = ConstraintSet::uniform_box(3, -1.0, 1.0);
  RngStream rng(8);
  for (int k = 0; k < 20; ++k) {
    const Vector x = sample_unit_ball(3, rng) * 0.5;
    const Vector g = sample_gaussian(3, rng);
    REQUIRE(zo_smd_step(x, g, 0.3, box) == zo_sgd_step(x, g, 0.3, box, true));
  }
  const OptConfig smd = default_config(Algorithm::ZoSmd);
  CHECK(smd.mu_schedule == SmoothingSchedule::InverseDt);
  CHECK(smoothing_radius(smd, 1, 1000, 20) == smd.estimator.mu / 20.0);
  CHECK(smoothing_radius(smd, 4, 1000, 20) == smd.estimator.mu / 80.0);
}

TEST_CASE("coordinate step") {
  const Vector x{{1.0, 2.0, 3.0}};
  CHECK(zo_scd_step(x, Vector::Zero(3), 0.1) == x);
  const Vector moved = zo_scd_step(x, Vector{{0.0, 5.0, 0.0}}, 0.1);
  CHECK(moved[0] == x[0]);
  CHECK(moved[1] != x[1]);
  CHECK(moved[2] == x[2]);
}

TEST_CASE("schedules") {
  OptConfig cfg;
  cfg.alpha = 0.2;
  CHECK(step_size(cfg, 4) == 0.1);
  cfg.alpha_schedule = StepSchedule::Constant;
  CHECK(step_size(cfg, 100) == 0.2);
  CHECK_THROWS_AS(step_size(cfg, 0), InvalidArgument);

  cfg.estimator.mu = 1.0;
  CHECK(smoothing_radius(cfg, 7, 100, 4) == doctest::Approx(1.0 / 20.0));
  cfg.mu_schedule = SmoothingSchedule::Constant;
  CHECK(smoothing_radius(cfg, 7, 100, 4) == 1.0);
  cfg.estimator.mu = 1e-12;
  CHECK(smoothing_radius(cfg, 1, 1, 1) == cfg.estimator.mu_floor);

  CHECK(momentum_beta1(cfg, 5) == 0.9);
  cfg.beta1_schedule = MomentumSchedule::InverseT;
  CHECK(momentum_beta1(cfg, 3) == doctest::Approx(0.3));
  CHECK(*momentum_ratio(cfg) == doctest::Approx(3.0));
  cfg.beta2 = 0.0;
  CHECK_FALSE(momentum_ratio(cfg).has_value());
}

TEST_CASE("names round trip") {
  for (Algorithm a : kAll) CHECK(parse_algorithm(to_string(a)) == a);
  CHECK_THROWS_AS(parse_algorithm("zo-adam"), ConfigError);
  for (auto s : {SmoothingSchedule::Constant, SmoothingSchedule::InverseSqrtTd, SmoothingSchedule::InverseDt}) {
    CHECK(parse_smoothing_schedule(to_string(s)) == s);
  }
  CHECK(parse_step_schedule(to_string(StepSchedule::Constant)) == StepSchedule::Constant);
  CHECK(parse_momentum_schedule(to_string(MomentumSchedule::InverseT)) == MomentumSchedule::InverseT);
  CHECK(parse_gradient_source("analytic") == GradientSource::Analytic);
  CHECK(parse_direction("gaussian") == DirectionKind::Gaussian);
}

TEST_CASE("defaults") {
  const OptConfig cfg = default_config(Algorithm::ZoAdaMM);
  CHECK(cfg.beta1 == 0.9);
  CHECK(cfg.beta2 == 0.3);
  CHECK(cfg.v0 == 1e-5);
  CHECK(cfg.vhat0 == 1e-5);
  CHECK(cfg.alpha_schedule == StepSchedule::InverseSqrt);
  CHECK(cfg.mu_schedule == SmoothingSchedule::InverseSqrtTd);
  CHECK(cfg.beta1_schedule == MomentumSchedule::Constant);
  CHECK(cfg.use_vhat_max);
  CHECK_FALSE(cfg.euclidean_projection_override);
}

TEST_CASE("iteration cost") {
  OptConfig cfg;
  cfg.estimator.b = 3;
  cfg.estimator.q = 4;
  CHECK(iteration_cost(cfg) == 15);
  cfg.algorithm = Algorithm::ZoNes;
  CHECK(iteration_cost(cfg) == 24);
  cfg.algorithm = Algorithm::ZoScd;
  cfg.scd_coords = 2;
  CHECK(iteration_cost(cfg) == 12);
  cfg.gradient = GradientSource::Analytic;
  CHECK(iteration_cost(cfg) == 0);
}

TEST_CASE("configuration errors name their key") {
  const ProblemSpec quad = make_quadratic(4, 2.0, 1);
  auto key_of = [&](const ProblemSpec& p, const OptConfig& cfg, std::uint64_t budget) {
    try {
      validate_config(p, cfg, budget);
    } catch (const ConfigError& e) {
      return e.key();
    }
    return std::string();
  };
  CHECK(key_of(quad, seeded(Algorithm::ZoAdaMM), 10) == "query_budget");
  OptConfig bad = seeded(Algorithm::ZoAdaMM);
  bad.beta1 = 1.5;
  CHECK(key_of(quad, bad, 1000) == "optimizer.beta1");
  bad = seeded(Algorithm::ZoAdaMM);
  bad.alpha = 0.0;
  CHECK(key_of(quad, bad, 1000) == "optimizer.alpha");
  bad = seeded(Algorithm::ZoScd);
  bad.scd_coords = 9;
  CHECK(key_of(quad, bad, 1000) == "optimizer.scd_coords");
  CHECK(key_of(boxed_quadratic(), seeded(Algorithm::ZoSgd), 1000) == "optimizer.name");
  bad = seeded(Algorithm::ZoAdaMM);
  bad.gradient = GradientSource::Analytic;
  CHECK(key_of(quad, bad, 1000) == "optimizer.max_iterations");
  CHECK(key_of(quad, seeded(Algorithm::ZoAdaMM), 11) == "");
  CHECK_THROWS_AS(run_optimizer(quad, seeded(Algorithm::ZoAdaMM), 10), ConfigError);
}

TEST_CASE("runs are deterministic") {
  const ProblemSpec quad = make_quadratic(5, 10.0, 1, 10, 0.5);
  for (Algorithm a : kAll) {
    CAPTURE(to_string(a));
    const RunResult r1 = run_optimizer(quad, seeded(a), 3000);
    const RunResult r2 = run_optimizer(quad, seeded(a), 3000);
    REQUIRE(r1.trace == r2.trace);
    REQUIRE(r1.final_x == r2.final_x);
    REQUIRE(r1.random_index == r2.random_index);
    const RunResult r3 = run_optimizer(quad, seeded(a, 4), 3000);
    REQUIRE(r3.final_x != r1.final_x);
  }
}

TEST_CASE("query budget accounting") {
  const ProblemSpec quad = make_quadratic(5, 10.0, 1, 10, 0.5);
  for (Algorithm a : kAll) {
    for (std::uint64_t budget : {11ull, 97ull, 1000ull, 4321ull}) {
      OptConfig cfg = seeded(a);
      cfg.estimator.b = 2;
      cfg.estimator.q = 3;
      cfg.scd_coords = 2;
      const std::uint64_t cost = iteration_cost(cfg);
      if (budget < cost) continue;
      const RunResult r = run_optimizer(quad, cfg, budget);
      CAPTURE(to_string(a));
      CAPTURE(budget);
      REQUIRE(r.total_queries <= budget);
      REQUIRE(r.total_queries + (cost - 1) >= budget);
      REQUIRE(r.total_queries == (budget / cost) * cost);
      REQUIRE(r.iterations == static_cast<std::int64_t>(budget / cost));
      REQUIRE(r.random_index >= 1);
      REQUIRE(r.random_index <= r.iterations);
      REQUIRE(r.trace.back().queries == r.total_queries);
      for (std::size_t k = 1; k < r.trace.size(); ++k) REQUIRE(r.trace[k].queries >= r.trace[k - 1].queries);
    }
  }
}

TEST_CASE("constrained iterates stay feasible") {
  const ProblemSpec boxed = boxed_quadratic();
  const ProblemSpec logistic = make_logistic(40, 5, 3, 1.0);
  const ProblemSpec lp = make_counterexample_lp();
  for (const ProblemSpec* p : {&boxed, &logistic, &lp}) {
    for (Algorithm a : {Algorithm::ZoAdaMM, Algorithm::ZoPsgd, Algorithm::ZoSmd, Algorithm::ZoNes}) {
      OptConfig cfg = seeded(a);
      cfg.alpha = 0.5;
      bool feasible = true;
      RunOptions opts;
      opts.observer = [&](const IterationView& v) { feasible = feasible && is_member(p->constraint, v.x_after); };
      run_optimizer(*p, cfg, 5000, opts);
      CAPTURE(p->tag);
      CAPTURE(to_string(a));
      CHECK(feasible);
    }
  }
}

TEST_CASE("second-moment maximum never decreases") {
  const ProblemSpec quad = make_quadratic(6, 20.0, 2, 12, 2.0);
  for (bool constrained : {false, true}) {
    ProblemSpec p = constrained ? boxed_quadratic() : quad;
    Vector prev = AdaMMState::initial(6, OptConfig{}).v_hat;
    bool monotone = true;
    int steps = 0;
    RunOptions opts;
    opts.observer = [&](const IterationView& v) {
      monotone = monotone && (v.adamm->v_hat.array() >= prev.array()).all();
      prev = v.adamm->v_hat;
      ++steps;
    };
    run_optimizer(p, seeded(Algorithm::ZoAdaMM), 20000, opts);
    CHECK(steps > 1000);
    CHECK(monotone);
  }
}

TEST_CASE("analytic gradients bypass the query counter") {
  const ProblemSpec quad = make_quadratic(4, 3.0, 6);
  OptConfig cfg = seeded(Algorithm::ZoPsgd);
  cfg.gradient = GradientSource::Analytic;
  cfg.max_iterations = 250;
  const RunResult r = run_optimizer(quad, cfg, 1);
  CHECK(r.iterations == 250);
  CHECK(r.total_queries == 0);
  CHECK(r.trace.back().loss < r.trace.front().loss);
}

TEST_CASE("numeric failures abort with the partial trace") {
  ProblemSpec p = make_quadratic(3, 2.0, 1);
  p.objective = StochasticObjective(3, SampleSpace::deterministic(), [](const Vector& x, SampleIndex) {
    return x[0] > 0.5 ? NAN : -x[0];
  });
  p.metadata = ProblemMetadata{};
  p.initial = Vector::Zero(3);
  OptConfig cfg = seeded(Algorithm::ZoSgd);
  cfg.alpha = 0.05;
  cfg.alpha_schedule = StepSchedule::Constant;
  RunOptions opts;
  opts.approximate_measure = false;
  const RunResult r = run_optimizer(p, cfg, 1000000, opts);
  CHECK(r.aborted);
  CHECK(r.abort_message.find("non-finite") != std::string::npos);
  CHECK(r.iterations > 0);
  CHECK(r.trace.size() >= 2);
}

TEST_CASE("Euclidean projection stalls on the counterexample while the weighted one moves") {
  const ProblemSpec lp = make_counterexample_lp();
  OptConfig cfg = seeded(Algorithm::ZoAdaMM);
  cfg.beta1 = cfg.beta2 = 0.0;
  cfg.gradient = GradientSource::Analytic;
  cfg.max_iterations = 1000;
  cfg.alpha = 0.01;

  std::vector<Vector> weighted;
  RunOptions opts;
  opts.observer = [&](const IterationView& v) { weighted.push_back(v.x_after); };
  run_optimizer(lp, cfg, 1, opts);
  REQUIRE(weighted.size() == 1000);
  CHECK((weighted[0] - Vector{{0.5 + 0.01 / 3.0, 0.5 - 0.01 / 3.0}}).cwiseAbs().maxCoeff() <= 1e-12);
  double x1 = 0.5;
  for (const Vector& x : weighted) {
    REQUIRE(std::abs(x[0] + x[1]) <= 1.0 + 1e-12);
    REQUIRE(x[0] > x1);
    x1 = x[0];
  }

  cfg.euclidean_projection_override = true;
  std::vector<Vector> euclid;
  opts.observer = [&](const IterationView& v) { euclid.push_back(v.x_after); };
  run_optimizer(lp, cfg, 1, opts);
  REQUIRE(euclid.size() == 1000);
  for (const Vector& x : euclid) REQUIRE(x == Vector{{0.5, 0.5}});
}
