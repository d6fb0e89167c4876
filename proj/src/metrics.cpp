#include "zoopt/metrics.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace zoopt {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InvalidArgument("trace CSV: cannot parse number '" + s + "'");
  }
  return v;
}

template <typename Int>
Int parse_int(const std::string& s) {
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InvalidArgument("trace CSV: cannot parse integer '" + s + "'");
  }
  return v;
}

std::optional<double> parse_optional(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_double(s);
}

void append_optional(std::string& out, const std::optional<double>& v) {
  out += ',';
  if (v) out += format_double(*v);
}

}  // namespace

double average_regret(std::span<const double> values, std::span<const double> comparator) {
  if (values.size() != comparator.size()) {
    throw InvalidArgument("average_regret: length mismatch");
  }
  if (values.empty()) throw InvalidArgument("average_regret: empty sequence");
  double acc = 0.0;
  for (std::size_t t = 0; t < values.size(); ++t) acc += values[t] - comparator[t];
  return acc / static_cast<double>(values.size());
}

std::optional<FirstSuccess> first_success(const std::vector<TraceRecord>& trace) {
  for (const auto& r : trace) {
    if (r.success.value_or(false)) return FirstSuccess{r.iter, r.queries, r.distortion};
  }
  return std::nullopt;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw InternalInvariant("format_double: buffer too small");
  return std::string(buf, ptr);
}

std::string trace_to_csv(const std::vector<TraceRecord>& trace) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : trace) {
    out += std::to_string(r.iter);
    out += ',';
    out += std::to_string(r.queries);
    out += ',';
    out += format_double(r.loss);
    append_optional(out, r.measure_m);
    append_optional(out, r.grad_norm_sq);
    append_optional(out, r.distortion);
    out += ',';
    if (r.success) out += *r.success ? "true" : "false";
    out += '\n';
  }
  return out;
}

std::vector<TraceRecord> trace_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw InvalidArgument("trace CSV: missing or unexpected header");
  }
  std::vector<TraceRecord> trace;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != 7) throw InvalidArgument("trace CSV: expected 7 cells in '" + line + "'");
    TraceRecord r;
    r.iter = parse_int<std::int64_t>(cells[0]);
    r.queries = parse_int<std::uint64_t>(cells[1]);
    r.loss = parse_double(cells[2]);
    r.measure_m = parse_optional(cells[3]);
    r.grad_norm_sq = parse_optional(cells[4]);
    r.distortion = parse_optional(cells[5]);
    if (cells[6] == "true") {
      r.success = true;
    } else if (cells[6] == "false") {
      r.success = false;
    } else if (!cells[6].empty()) {
      throw InvalidArgument("trace CSV: bad success cell '" + cells[6] + "'");
    }
    trace.push_back(r);
  }
  return trace;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << text;
  out.close();
  if (!out) throw IoError("write failed: " + path.string());
}

void serialize_csv(const RunResult& result, const std::filesystem::path& path) {
  write_text_file(path, trace_to_csv(result.trace));
}

std::vector<TraceRecord> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return trace_from_csv(buf.str());
}

nlohmann::ordered_json result_envelope(const nlohmann::ordered_json& config,
                                       const RunResult& result, const std::string& csv_path,
                                       bool include_seconds) {
  nlohmann::ordered_json summary;
  summary["final_loss"] = result.trace.empty() ? nlohmann::ordered_json(nullptr)
                                               : nlohmann::ordered_json(result.trace.back().loss);
  if (const auto fs = first_success(result.trace)) {
    nlohmann::ordered_json j;
    j["iter"] = fs->iter;
    j["queries"] = fs->queries;
    j["distortion"] = fs->distortion ? nlohmann::ordered_json(*fs->distortion)
                                     : nlohmann::ordered_json(nullptr);
    summary["first_success"] = j;
  } else {
    summary["first_success"] = nullptr;
  }
  summary["total_queries"] = result.total_queries;
  summary["seconds"] = include_seconds ? nlohmann::ordered_json(result.seconds)
                                       : nlohmann::ordered_json(nullptr);
  summary["iterations"] = result.iterations;
  summary["random_iterate"] = result.random_index;
  summary["aborted"] = result.aborted;
  if (result.aborted) summary["abort_message"] = result.abort_message;

  nlohmann::ordered_json env;
  env["config"] = config;
  env["summary"] = summary;
  env["csv_path"] = csv_path;
  env["measure_m_approx"] = result.measure_approx;
  return env;
}

}  // namespace zoopt
