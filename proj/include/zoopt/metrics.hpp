#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "zoopt/numkit.hpp"

namespace zoopt {

/// One row of a convergence trace.
struct TraceRecord {
  std::int64_t iter = 0;
  std::uint64_t queries = 0;
  double loss = 0.0;
  std::optional<double> measure_m;
  std::optional<double> grad_norm_sq;
  std::optional<double> distortion;
  std::optional<bool> success;

  bool operator==(const TraceRecord&) const = default;
};

struct RunResult {
  std::vector<TraceRecord> trace;
  Vector final_x;
  std::int64_t iterations = 0;
  /// Uniformly drawn iterate index in [1, iterations]; 0 when no iteration ran.
  std::int64_t random_index = 0;
  std::uint64_t total_queries = 0;
  double seconds = 0.0;
  bool aborted = false;
  std::string abort_message;
  /// measure_m came from an estimator rather than an analytic gradient.
  bool measure_approx = false;
};

struct FirstSuccess {
  std::int64_t iter;
  std::uint64_t queries;
  std::optional<double> distortion;
};

/// (1/T) sum_t [f_t(x_t) - f_t(x*)].
double average_regret(std::span<const double> values, std::span<const double> comparator);

std::optional<FirstSuccess> first_success(const std::vector<TraceRecord>& trace);

inline constexpr const char* kCsvHeader =
    "iter,queries,loss,measure_m,grad_norm_sq,distortion,success";

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

std::string trace_to_csv(const std::vector<TraceRecord>& trace);
std::vector<TraceRecord> trace_from_csv(const std::string& text);

/// Writes the trace as CSV (LF line endings). Throws IoError naming the path.
void serialize_csv(const RunResult& result, const std::filesystem::path& path);
std::vector<TraceRecord> read_csv(const std::filesystem::path& path);

/// {config, summary{final_loss, first_success, total_queries, seconds}, csv_path, ...}.
/// Wall-clock seconds are emitted only when `include_seconds` is set, so that
/// repeated runs produce identical files.
nlohmann::ordered_json result_envelope(const nlohmann::ordered_json& config,
                                       const RunResult& result, const std::string& csv_path,
                                       bool include_seconds);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace zoopt
