#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "zoopt/numkit.hpp"

namespace zoopt {

struct PropertyResult {
  std::string suite;
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double bound = 0.0;
  std::string detail;
};

struct ValidateOptions {
  std::uint64_t seed = 7;
  /// Replaces the estimator floor in the smoothing suite. A floor above the
  /// probe radius silently inflates mu and must be caught by the suite.
  std::optional<double> mu_floor;
};

/// smoothing, estimators, geometry, reductions.
const std::vector<std::string>& validation_suites();

/// Runs one suite ("all" runs every suite). Unknown names throw ConfigError.
std::vector<PropertyResult> run_validation(const std::string& suite,
                                           const ValidateOptions& options = {});

/// "PASS suite/name measured=... bound=..." line.
std::string format_property(const PropertyResult& r);

/// argmin sum_i h_i (x_i - y_i)^2 over |a^T x| <= b by Gauss-Seidel sweeps on
/// the active face with one coordinate eliminated. Slow; for cross-checks only.
Vector brute_force_band_projection(const Vector& a, double b, const Vector& h, const Vector& y);

}  // namespace zoopt
