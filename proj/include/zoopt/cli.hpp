#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "zoopt/config.hpp"
#include "zoopt/optimizers.hpp"
#include "zoopt/problems.hpp"

namespace zoopt {

enum ExitCode : int {
  kExitOk = 0,
  kExitPropertyFailure = 1,
  kExitConfigError = 2,
  kExitNumericAbort = 3,
};

/// `ZOOPT_THREADS` when set, else `configured`; never below 1.
std::size_t worker_count(std::size_t configured);

/// Runs job(0..n-1) on up to `workers` threads. The first exception (by job
/// index) is rethrown after all workers have joined.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& job);

struct RunOutcome {
  std::filesystem::path csv;
  std::filesystem::path json;
  RunResult result;
};

/// One run of a resolved experiment with its own seed; writes `<stem>.csv`
/// and `<stem>.json` under the output directory.
RunOutcome execute_run(const ExperimentConfig& cfg, std::uint64_t seed, const std::string& stem);

int cmd_run(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err);
int cmd_sweep(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err);

struct Prop1Variant {
  std::string name;
  Vector final_x;
  std::vector<Vector> iterates;
  std::vector<double> objective;
  bool pass = false;
  std::string detail;
};

struct Prop1Report {
  Prop1Variant euclidean;
  Prop1Variant mahalanobis;
  double vi_witness = 0.0;
  bool vi_pass = false;
  double seconds = 0.0;

  bool pass() const { return euclidean.pass && mahalanobis.pass && vi_pass; }
};

/// Both projection variants of the adaptive method (beta1 = beta2 = 0, exact
/// gradient) on the counterexample LP for `iterations` steps.
Prop1Report run_prop1(std::int64_t iterations = 1000, double alpha = 0.01);
int cmd_prop1(std::ostream& out);

int cmd_validate(const std::string& suite, std::ostream& out, std::ostream& err,
                 std::optional<double> mu_floor = std::nullopt);

enum class AttackScope { PerImage, Universal };

std::string to_string(AttackScope s);
AttackScope parse_attack_scope(const std::string& name);

struct AttackRequest {
  AttackScope scope = AttackScope::PerImage;
  /// Number of pinned inputs used (the first m).
  std::size_t m = kPinnedInputCount;
  std::vector<Algorithm> optimizers{Algorithm::ZoAdaMM, Algorithm::ZoPsgd};
  std::uint64_t budget = 11000;
  std::uint64_t seed = 1;
  /// Seeds seed, seed + 1, ..., seed + repeat - 1.
  std::uint64_t repeat = 1;
  std::filesystem::path out_dir = "attack-out";
  std::size_t threads = 1;
  AttackOptions options;
  /// Empty = built-in victim model / pinned inputs.
  std::string model_path;
  std::string inputs_path;
  bool write_files = true;
};

/// Optimizer settings used for attacks. Step sizes for zo-adamm, zo-psgd,
/// zo-nes and zo-smd are the grid values with the lowest median distortion at
/// >= 8/10 median success on seeds 101..103; the other methods keep their
/// defaults. q = 10 (5 antithetic pairs for zo-nes), b = 1 per image and m/2
/// for universal runs.
OptConfig attack_config(Algorithm a, AttackScope scope, std::size_t m);

struct AttackSeedSummary {
  std::uint64_t seed = 0;
  /// Per-image: images attacked. Universal: images in the shared run.
  std::size_t images = 0;
  /// Per-image: runs whose trace reached success. Universal: most images
  /// fooled at once by one iterate.
  std::size_t successes = 0;
  std::optional<double> median_first_success_queries;
  double median_final_distortion = 0.0;
};

struct AttackOptimizerSummary {
  Algorithm algorithm = Algorithm::ZoAdaMM;
  std::vector<AttackSeedSummary> seeds;
  double median_successes = 0.0;
  std::optional<double> median_first_success_queries;
  double median_final_distortion = 0.0;
};

struct AttackReport {
  AttackRequest request;
  std::vector<AttackOptimizerSummary> optimizers;
  std::size_t aborted_runs = 0;
};

AttackReport run_attack(const AttackRequest& request);
nlohmann::ordered_json attack_report_json(const AttackReport& report);
std::string attack_report_text(const AttackReport& report);
int cmd_attack(const AttackRequest& request, std::ostream& out, std::ostream& err);

inline constexpr const char* kVictimModelFile = "victim_mlp.json";
inline constexpr const char* kVictimInputsFile = "attack_inputs.json";

/// Writes the built-in victim model and pinned inputs as JSON.
int cmd_export_victim(const std::filesystem::path& out_dir, std::ostream& out, std::ostream& err);

double median(std::vector<double> values);

}  // namespace zoopt
