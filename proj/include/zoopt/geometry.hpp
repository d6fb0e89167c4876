#pragma once

#include <string>
#include <variant>

#include "zoopt/numkit.hpp"

namespace zoopt {

/// Tolerance for membership tests and projection identities.
inline constexpr double kFeasibilityTol = 1e-12;

struct Unconstrained {};

struct Box {
  Vector lo;
  Vector hi;
};

/// |a^T x| <= b.
struct SymmetricBand {
  Vector a;
  double b;
};

struct L2Ball {
  Vector center;
  double radius;
};

/// Feasible set X. Construct through the factories, which enforce the
/// per-variant invariants (lo <= hi, a != 0, b > 0, radius > 0).
class ConstraintSet {
 public:
  using Variant = std::variant<Unconstrained, Box, SymmetricBand, L2Ball>;

  ConstraintSet() = default;

  static ConstraintSet unconstrained();
  static ConstraintSet box(Vector lo, Vector hi);
  static ConstraintSet uniform_box(Index d, double lo, double hi);
  static ConstraintSet symmetric_band(Vector a, double b);
  static ConstraintSet l2_ball(Vector center, double radius);

  const Variant& variant() const noexcept { return set_; }
  bool is_unconstrained() const noexcept { return std::holds_alternative<Unconstrained>(set_); }
  std::string name() const;

  template <typename T>
  const T& as() const {
    return std::get<T>(set_);
  }

 private:
  explicit ConstraintSet(Variant v) : set_(std::move(v)) {}
  Variant set_ = Unconstrained{};
};

/// Positive diagonal weights h defining H = diag(h).
class DiagonalMetric {
 public:
  explicit DiagonalMetric(Vector h);

  static DiagonalMetric identity(Index d);
  /// h = sqrt(v_hat); the weighting used by the adaptive projection step.
  static DiagonalMetric from_second_moment(const Vector& v_hat);

  const Vector& weights() const noexcept { return h_; }
  Index dim() const noexcept { return h_.size(); }
  bool is_uniform() const;

 private:
  Vector h_;
};

bool is_member(const ConstraintSet& set, const Vector& x, double tol = kFeasibilityTol);

/// argmin_{x in X} ||x - y||_2.
Vector project_euclidean(const ConstraintSet& set, const Vector& y);

/// argmin_{x in X} sum_i h_i (x_i - y_i)^2.
///
/// Closed forms for the box (clamp, separable under a diagonal metric) and the
/// band (projection onto the violated hyperplane along H^{-1} a). The ball has
/// no closed form under a non-uniform metric; the multiplier of
/// ||c + h*z/(h + lambda) - c|| = r is found by bisection and the feasible end
/// of the bracket is returned.
Vector project_mahalanobis(const ConstraintSet& set, const DiagonalMetric& metric,
                           const Vector& y);

/// P = (x_minus - x_plus) / omega with
/// x_plus = argmin_{x in X} <g, x> + (1/omega) ||H^{1/2}(x - x_minus)||^2 / 2.
Vector gradient_mapping(const ConstraintSet& set, const DiagonalMetric& metric,
                        const Vector& x_minus, const Vector& g, double omega);

/// ||H^{1/2} P(x, grad, alpha)||^2 with H = diag(h) = V^{1/2}; for the
/// unconstrained case this is sum_i grad_i^2 / h_i.
double mahalanobis_measure(const ConstraintSet& set, const DiagonalMetric& metric,
                           const Vector& x, const Vector& grad, double alpha);

/// <grad, x_test - x_star>; negative means x_star violates the variational
/// inequality that characterises stationarity.
double vi_violation(const Vector& grad, const Vector& x_star, const Vector& x_test);

}  // namespace zoopt
