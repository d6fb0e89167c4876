#include <doctest.h>

#include <cmath>

#include "zoopt/smoothing.hpp"
#include "zoopt/validation.hpp"

using namespace zoopt;

namespace {

StochasticObjective quadratic(const Vector& a, const Vector& b) {
  return StochasticObjective(a.size(), SampleSpace::deterministic(), [a, b](const Vector& x, SampleIndex) {
    double acc = 0.0;
    for (Index i = 0; i < x.size(); ++i) acc += 0.5 * a[i] * x[i] * x[i] + b[i] * x[i];
    return acc;
  });
}

}  // namespace

TEST_CASE("smoothed value") {
  SmoothingProbe probe;
  probe.samples = 20000;
  const StochasticObjective c(3, SampleSpace::deterministic(), [](const Vector&, SampleIndex) { return 4.25; });
  const auto vc = smooth_value_mc(c, Vector::Ones(3), 0, probe);
  CHECK(vc.mean == 4.25);
  CHECK(vc.std_error == 0.0);

  const Vector a{{0.5, -1.0, 2.0}};
  const auto lin = quadratic(Vector::Zero(3), a);
  const Vector x{{0.1, 0.2, 0.3}};
  const auto vl = smooth_value_mc(lin, x, 0, probe);
  CHECK(std::abs(vl.mean - dot(a, x)) <= 4.0 * vl.std_error);

  SmoothingProbe p2;
  p2.mu = 0.1;
  p2.samples = 100000;
  const auto sq = quadratic(Vector::Constant(2, 2.0), Vector::Zero(2));
  const auto vs = smooth_value_mc(sq, Vector::Zero(2), 0, p2);
  CHECK(std::abs(vs.mean - 0.005) <= 4.0 * vs.std_error);
  CHECK(vs.std_error > 0.0);
}

TEST_CASE("smoothed gradient") {
  SmoothingProbe probe;
  probe.samples = 50000;
  probe.mu = 0.05;
  const StochasticObjective c(4, SampleSpace::deterministic(), [](const Vector&, SampleIndex) { return -1.0; });
  CHECK(smooth_grad_mc(c, Vector::Zero(4), 0, probe).mean == Vector::Zero(4));

  const Vector b{{1.0, -2.0, 0.5, 3.0}};
  const auto lin = smooth_grad_mc(quadratic(Vector::Zero(4), b), Vector::Ones(4), 0, probe);
  for (Index i = 0; i < 4; ++i) CHECK(std::abs(lin.mean[i] - b[i]) <= 4.0 * lin.std_error[i]);

  const Vector a{{1.0, 3.0, 5.0, 9.0}};
  const Vector x{{0.3, -0.4, 0.1, 0.2}};
  const auto quad = smooth_grad_mc(quadratic(a, b), x, 0, probe);
  const auto exact = analytic_smooth_quadratic(a, b, x, probe.mu);
  for (Index i = 0; i < 4; ++i) CHECK(std::abs(quad.mean[i] - exact.grad[i]) <= 4.0 * quad.std_error[i]);
  CHECK(quad.second_moment > 0.0);
  CHECK(quad.second_moment_std_error > 0.0);
}

TEST_CASE("closed-form smoothed quadratic") {
  const auto s = analytic_smooth_quadratic(Vector::Constant(2, 2.0), Vector::Zero(2), Vector::Zero(2), 0.1);
  CHECK(s.value == doctest::Approx(0.005).epsilon(1e-12));
  CHECK(s.grad == Vector::Zero(2));

  const Vector a{{1.0, 4.0}};
  const Vector b{{-1.0, 0.5}};
  const Vector x{{2.0, -1.0}};
  const auto plain = analytic_smooth_quadratic(a, b, x, 0.0);
  CHECK(plain.value == doctest::Approx(0.5 * 4.0 + 0.5 * 4.0 * 1.0 - 2.0 - 0.5));
  CHECK(plain.grad == Vector{{1.0, -3.5}});

  const auto linear = analytic_smooth_quadratic(Vector::Zero(2), b, x, 0.7);
  CHECK(linear.value == dot(b, x));
  CHECK(linear.grad == b);
  CHECK_THROWS_AS(analytic_smooth_quadratic(a, b, x, -1.0), InvalidArgument);
}

TEST_CASE("probe validation") {
  SmoothingProbe p;
  p.mu = 0.0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p.mu = 0.1;
  p.samples = 0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
}

TEST_CASE("smoothing bounds hold on the reference problems") {
  for (const auto& r : run_validation("smoothing")) {
    CAPTURE(format_property(r));
    CHECK(r.pass);
  }
}

TEST_CASE("an inflated estimator floor breaks the smoothing bounds") {
  ValidateOptions opts;
  opts.mu_floor = 1.0;
  bool any_fail = false;
  for (const auto& r : run_validation("smoothing", opts)) any_fail = any_fail || !r.pass;
  CHECK(any_fail);
}
