#pragma once

#include <cstdint>

#include "zoopt/estimators.hpp"

namespace zoopt {

/// Monte-Carlo settings for f_mu(x) = E_{u ~ U(ball)} f(x + mu u).
struct SmoothingProbe {
  double mu = 0.01;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  double mu_floor = kDefaultMuFloor;

  void validate() const;
};

struct MonteCarloValue {
  double mean = 0.0;
  double std_error = 0.0;
};

struct MonteCarloGradient {
  Vector mean;
  /// Per-coordinate standard error of `mean`.
  Vector std_error;
  /// E ||g_hat||^2 and its standard error.
  double second_moment = 0.0;
  double second_moment_std_error = 0.0;
};

MonteCarloValue smooth_value_mc(const StochasticObjective& obj, const Vector& x, SampleIndex xi,
                                const SmoothingProbe& probe);

/// Average of `probe.samples` independent two-point sphere estimates at x.
MonteCarloGradient smooth_grad_mc(const StochasticObjective& obj, const Vector& x, SampleIndex xi,
                                  const SmoothingProbe& probe);

struct SmoothQuadratic {
  double value = 0.0;
  Vector grad;
};

/// Closed form of f_mu for f(x) = 1/2 sum_i A_i x_i^2 + b^T x.
SmoothQuadratic analytic_smooth_quadratic(const Vector& a_diag, const Vector& b, const Vector& x,
                                          double mu);

}  // namespace zoopt
