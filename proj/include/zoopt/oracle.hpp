#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "zoopt/numkit.hpp"

namespace zoopt {

using SampleIndex = std::uint64_t;

/// Where the random variable xi of f(x; xi) lives.
struct SampleSpace {
  enum class Kind { Deterministic, Finite, Unbounded };

  Kind kind = Kind::Deterministic;
  std::uint64_t size = 1;  // meaningful for Finite only

  static SampleSpace deterministic() { return {Kind::Deterministic, 1}; }
  static SampleSpace finite(std::uint64_t n);
  /// xi is an arbitrary 64-bit key (e.g. a noise seed); no exact average exists.
  static SampleSpace unbounded() { return {Kind::Unbounded, 0}; }

  bool contains(SampleIndex xi) const;
};

/// Black-box f(x; xi). Optimizers only ever see values returned by `evaluate`,
/// which counts queries; metric code uses the uncounted `evaluate_uncounted`
/// and `full_loss`.
class StochasticObjective {
 public:
  using EvalFn = std::function<double(const Vector&, SampleIndex)>;

  StochasticObjective(Index dim, SampleSpace space, EvalFn fn);
  StochasticObjective(const StochasticObjective& other);
  StochasticObjective& operator=(const StochasticObjective& other);

  Index dim() const noexcept { return dim_; }
  const SampleSpace& sample_space() const noexcept { return space_; }

  /// f(x; xi), counted. Thread-safe.
  double evaluate(const Vector& x, SampleIndex xi) const;
  /// f(x; xi) without touching the query counter.
  double evaluate_uncounted(const Vector& x, SampleIndex xi) const;

  std::uint64_t queries() const noexcept { return queries_.load(std::memory_order_relaxed); }
  void reset_queries() const noexcept { queries_.store(0, std::memory_order_relaxed); }

 private:
  double checked_eval(const Vector& x, SampleIndex xi) const;

  Index dim_;
  SampleSpace space_;
  EvalFn fn_;
  mutable std::atomic<std::uint64_t> queries_{0};
};

/// b indices drawn uniformly with replacement; b copies of 0 for deterministic
/// objectives.
std::vector<SampleIndex> sample_minibatch(const StochasticObjective& obj, std::size_t b,
                                          RngStream& rng);

/// Exact (1/n) sum_i f(x; xi_i). Never counted as a query.
double full_loss(const StochasticObjective& obj, const Vector& x);

/// Known constants of a test problem. All fields optional.
struct ProblemMetadata {
  using GradientFn = std::function<Vector(const Vector&, SampleIndex)>;

  std::optional<double> lipschitz;           // L_c
  std::optional<double> gradient_lipschitz;  // L_g
  std::optional<double> gradient_bound;      // eta, sup-norm bound of stochastic gradients
  std::optional<double> optimal_value;       // f*
  std::optional<Vector> minimizer;           // x* when known (or computed)
  /// Per-sample analytic gradient; test and metric use only.
  GradientFn gradient;

  bool has_gradient() const { return static_cast<bool>(gradient); }
};

/// Average of the per-sample analytic gradients over the full sample space.
Vector full_gradient(const StochasticObjective& obj, const ProblemMetadata& meta,
                     const Vector& x);

}  // namespace zoopt
