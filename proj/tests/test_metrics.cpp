#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "zoopt/metrics.hpp"
#include "zoopt/optimizers.hpp"
#include "zoopt/problems.hpp"

using namespace zoopt;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "zoopt_test_metrics";
  std::filesystem::create_directories(dir);
  return dir / name;
}

TraceRecord row(std::int64_t iter, std::optional<bool> success = std::nullopt) {
  TraceRecord r;
  r.iter = iter;
  r.queries = static_cast<std::uint64_t>(iter) * 11;
  r.loss = 1.0 / (1.0 + static_cast<double>(iter));
  r.distortion = 0.01 * static_cast<double>(iter);
  r.success = success;
  return r;
}

}  // namespace

TEST_CASE("average regret") {
  const std::vector<double> same{1.0, 2.0, 3.0};
  CHECK(average_regret(same, same) == 0.0);
  const std::vector<double> shifted{1.5, 2.5, 3.5};
  CHECK(average_regret(shifted, same) == 0.5);
  CHECK_THROWS_AS(average_regret(same, std::vector<double>{1.0}), InvalidArgument);
  CHECK_THROWS_AS(average_regret(std::vector<double>{}, std::vector<double>{}), InvalidArgument);
}

TEST_CASE("regret of a logistic run matches compensated summation") {
  const ProblemSpec p = make_logistic(100, 6, 4);
  OptConfig cfg = default_config(Algorithm::ZoAdaMM);
  cfg.trace_stride = 1;
  const RunResult r = run_optimizer(p, cfg, 22000);
  const Vector planted = logistic_planted_weights(6, 4);
  const double reference = full_loss(p.objective, planted);
  std::vector<double> values, comparator;
  for (std::size_t k = 1; k < r.trace.size(); ++k) {
    values.push_back(r.trace[k].loss);
    comparator.push_back(reference);
  }
  long double acc = 0.0L;
  for (std::size_t t = 0; t < values.size(); ++t) acc += static_cast<long double>(values[t]) - reference;
  const double oracle = static_cast<double>(acc / static_cast<long double>(values.size()));
  CHECK(std::abs(average_regret(values, comparator) - oracle) <= 1e-12);
}

TEST_CASE("first success") {
  std::vector<TraceRecord> none{row(0, false), row(1), row(2, false)};
  CHECK_FALSE(first_success(none).has_value());

  std::vector<TraceRecord> trace;
  for (int i = 0; i < 8; ++i) trace.push_back(row(i, i == 5));
  const auto at5 = first_success(trace);
  REQUIRE(at5.has_value());
  CHECK(at5->iter == 5);
  CHECK(at5->queries == 55);
  CHECK(*at5->distortion == 0.05);

  for (auto& r : trace) r.success = r.iter == 3 || r.iter == 7;
  CHECK(first_success(trace)->iter == 3);
}

TEST_CASE("doubles print shortest and parse back exactly") {
  RngStream rng(12);
  for (int k = 0; k < 10000; ++k) {
    const double v = std::ldexp(rng.uniform() - 0.5, static_cast<int>(rng.below(200)) - 100);
    REQUIRE(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-1.5) == "-1.5");
}

TEST_CASE("CSV") {
  SUBCASE("empty trace is the header only") {
    RunResult r;
    const auto path = scratch("empty.csv");
    serialize_csv(r, path);
    CHECK(read_csv(path).empty());
    CHECK(trace_to_csv({}) == std::string(kCsvHeader) + "\n");
  }
  SUBCASE("absent fields are empty cells and false is literal") {
    TraceRecord r;
    r.iter = 3;
    r.queries = 7;
    r.loss = 0.25;
    r.success = false;
    CHECK(trace_to_csv({r}) == std::string(kCsvHeader) + "\n3,7,0.25,,,,false\n");
  }
  SUBCASE("round trip on random records") {
    RngStream rng(13);
    RunResult result;
    for (int k = 0; k < 500; ++k) {
      TraceRecord r;
      r.iter = k;
      r.queries = rng.below(1u << 30);
      r.loss = std::ldexp(rng.normal(), static_cast<int>(rng.below(80)) - 40);
      if (rng.uniform() < 0.7) r.measure_m = rng.uniform() * 1e-7;
      if (rng.uniform() < 0.7) r.grad_norm_sq = std::numeric_limits<double>::denorm_min() * (k + 1);
      if (rng.uniform() < 0.5) r.distortion = rng.normal() * 1e12;
      if (rng.uniform() < 0.5) r.success = rng.uniform() < 0.5;
      result.trace.push_back(r);
    }
    const auto path = scratch("random.csv");
    serialize_csv(result, path);
    CHECK(read_csv(path) == result.trace);
  }
  CHECK_THROWS_AS(trace_from_csv("bad header\n"), InvalidArgument);
  CHECK_THROWS_AS(trace_from_csv(std::string(kCsvHeader) + "\n1,2,x,,,,\n"), InvalidArgument);
  CHECK_THROWS_AS(read_csv("/nonexistent/dir/trace.csv"), IoError);
  CHECK_THROWS_AS(serialize_csv(RunResult{}, "/nonexistent/dir/trace.csv"), IoError);
}

TEST_CASE("result envelope") {
  RunResult r;
  r.trace = {row(0, false), row(1, true)};
  r.total_queries = 11;
  r.iterations = 1;
  r.random_index = 1;
  r.seconds = 0.123;
  nlohmann::ordered_json cfg;
  cfg["problem"] = "quadratic";
  const auto env = result_envelope(cfg, r, "run.csv", false);
  CHECK(env["config"]["problem"] == "quadratic");
  CHECK(env["csv_path"] == "run.csv");
  CHECK(env["summary"]["final_loss"] == r.trace.back().loss);
  CHECK(env["summary"]["first_success"]["iter"] == 1);
  CHECK(env["summary"]["total_queries"] == 11);
  CHECK(env["summary"]["seconds"].is_null());
  CHECK(env["measure_m_approx"] == false);
  CHECK(result_envelope(cfg, r, "run.csv", true)["summary"]["seconds"] == 0.123);
  r.trace.pop_back();
  CHECK(result_envelope(cfg, r, "run.csv", false)["summary"]["first_success"].is_null());
}
