#include <doctest.h>

#include <cmath>
#include <limits>
#include <thread>
#include <vector>

#include "zoopt/oracle.hpp"
#include "zoopt/problems.hpp"

using namespace zoopt;

namespace {

StochasticObjective squared_norm_objective(Index d) {
  return StochasticObjective(d, SampleSpace::deterministic(),
                             [](const Vector& x, SampleIndex) { return squared_norm(x); });
}

}  // namespace

TEST_CASE("evaluate counts queries") {
  const ProblemSpec lp = make_counterexample_lp();
  const Vector x{{0.5, 0.5}};
  CHECK(lp.objective.evaluate(x, 0) == -1.5);
  const auto before = lp.objective.queries();
  const double a = lp.objective.evaluate(x, 0);
  const double b = lp.objective.evaluate(x, 0);
  CHECK(a == b);
  CHECK(lp.objective.queries() == before + 2);
  lp.objective.reset_queries();
  CHECK(lp.objective.queries() == 0);

  CHECK(squared_norm_objective(3).evaluate(Vector::Zero(3), 0) == 0.0);
}

TEST_CASE("evaluate rejects bad input") {
  const auto obj = squared_norm_objective(2);
  CHECK_THROWS_AS(obj.evaluate(Vector::Zero(3), 0), InvalidArgument);
  CHECK_THROWS_AS(obj.evaluate(Vector::Zero(2), 1), InvalidSample);

  const StochasticObjective finite(1, SampleSpace::finite(3),
                                   [](const Vector&, SampleIndex xi) { return double(xi); });
  CHECK_NOTHROW(finite.evaluate(Vector::Zero(1), 2));
  CHECK_THROWS_AS(finite.evaluate(Vector::Zero(1), 3), InvalidSample);

  const StochasticObjective bad(2, SampleSpace::deterministic(), [](const Vector& x, SampleIndex) {
    return x[0] > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  });
  try {
    bad.evaluate(Vector{{1.5, -2.0}}, 0);
    FAIL("expected a numeric error");
  } catch (const NumericError& e) {
    CHECK(e.point() == std::vector<double>{1.5, -2.0});
  }
}

TEST_CASE("evaluate is safe to call concurrently") {
  const auto obj = squared_norm_objective(4);
  std::vector<std::thread> workers;
  for (int w = 0; w < 4; ++w) {
    workers.emplace_back([&obj] {
      for (int i = 0; i < 1000; ++i) obj.evaluate(Vector::Ones(4), 0);
    });
  }
  for (auto& t : workers) t.join();
  CHECK(obj.queries() == 4000);
}

TEST_CASE("sample_minibatch") {
  RngStream rng(9);
  const auto det = squared_norm_objective(2);
  CHECK(sample_minibatch(det, 3, rng) == std::vector<SampleIndex>{0, 0, 0});
  CHECK(sample_minibatch(det, 1, rng).size() == 1);
  CHECK_THROWS_AS(sample_minibatch(det, 0, rng), InvalidArgument);

  const StochasticObjective ten(1, SampleSpace::finite(10), [](const Vector&, SampleIndex) { return 0.0; });
  const auto batch = sample_minibatch(ten, 100000, rng);
  std::vector<int> counts(10, 0);
  for (auto xi : batch) {
    REQUIRE(xi < 10);
    ++counts[xi];
  }
  for (int c : counts) CHECK(std::abs(c / 100000.0 - 0.1) <= 0.01);
}

TEST_CASE("full_loss") {
  const auto det = squared_norm_objective(2);
  const Vector x{{1.0, 2.0}};
  CHECK(full_loss(det, x) == det.evaluate(x, 0));

  const StochasticObjective two(1, SampleSpace::finite(2),
                                [](const Vector&, SampleIndex xi) { return xi == 0 ? 1.0 : 3.0; });
  CHECK(full_loss(two, Vector::Zero(1)) == 2.0);
  CHECK(two.queries() == 0);

  const StochasticObjective noisy(1, SampleSpace::unbounded(), [](const Vector&, SampleIndex) { return 0.0; });
  CHECK_THROWS_AS(full_loss(noisy, Vector::Zero(1)), UnsupportedOperation);
}

TEST_CASE("full_loss of the logistic problem matches compensated summation") {
  const ProblemSpec p = make_logistic(300, 8, 17);
  const Vector w = logistic_planted_weights(8, 17);
  long double acc = 0.0L;
  for (SampleIndex i = 0; i < 300; ++i) acc += p.objective.evaluate_uncounted(w, i);
  const double oracle = static_cast<double>(acc / 300.0L);
  CHECK(std::abs(full_loss(p.objective, w) - oracle) <= 1e-12);
  CHECK(p.objective.queries() == 0);
}

TEST_CASE("full_gradient averages analytic gradients") {
  const ProblemSpec p = make_quadratic(4, 5.0, 3, 16, 1.0);
  const Vector x{{0.1, -0.2, 0.3, 0.4}};
  Vector acc = Vector::Zero(4);
  for (SampleIndex i = 0; i < 16; ++i) acc += p.metadata.gradient(x, i);
  CHECK((full_gradient(p.objective, p.metadata, x) - acc / 16.0).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK_THROWS_AS(full_gradient(p.objective, ProblemMetadata{}, x), UnsupportedOperation);
}
