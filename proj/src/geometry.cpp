#include "zoopt/geometry.hpp"

#include <algorithm>

namespace zoopt {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_finite(const Vector& v, const char* what) {
  if (!all_finite(v)) throw InvalidArgument(std::string(what) + ": non-finite entries");
}

Vector clamp(const Box& box, const Vector& y) {
  require_same_dim(box.lo, y, "box projection");
  return y.cwiseMax(box.lo).cwiseMin(box.hi);
}

Vector ball_euclidean(const L2Ball& ball, const Vector& y) {
  require_same_dim(ball.center, y, "ball projection");
  const Vector z = y - ball.center;
  const double n = norm(z);
  if (n <= ball.radius) return y;
  return ball.center + z * (ball.radius / n);
}

Vector ball_weighted(const L2Ball& ball, const Vector& h, const Vector& y) {
  require_same_dim(ball.center, y, "ball projection");
  const Vector z = y - ball.center;
  const double r2 = ball.radius * ball.radius;
  if (squared_norm(z) <= r2) return y;

  auto radius_sq_at = [&](double lambda) {
    double acc = 0.0;
    for (Index i = 0; i < z.size(); ++i) {
      const double c = h[i] * z[i] / (h[i] + lambda);
      acc += c * c;
    }
    return acc;
  };
  double lo = 0.0;
  double hi = h.maxCoeff() * norm(z) / ball.radius;
  while (radius_sq_at(hi) > r2) hi *= 2.0;
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (radius_sq_at(mid) > r2 ? lo : hi) = mid;
  }
  Vector x(z.size());
  for (Index i = 0; i < z.size(); ++i) x[i] = ball.center[i] + h[i] * z[i] / (h[i] + hi);
  return x;
}

Vector band_weighted(const SymmetricBand& band, const Vector& h, const Vector& y) {
  require_same_dim(band.a, y, "band projection");
  const double s = dot(band.a, y);
  if (std::abs(s) <= band.b) return y;
  const double side = s > 0.0 ? 1.0 : -1.0;
  const Vector hinv_a = band.a.cwiseQuotient(h);
  const double denom = dot(band.a, hinv_a);
  if (!(denom > 0.0) || !std::isfinite(denom)) {
    throw InternalInvariant("band projection: a^T H^{-1} a must be positive");
  }
  const double step = (s - side * band.b) / denom;
  return y - hinv_a * step;
}

}  // namespace

ConstraintSet ConstraintSet::unconstrained() { return ConstraintSet(Unconstrained{}); }

ConstraintSet ConstraintSet::box(Vector lo, Vector hi) {
  require_same_dim(lo, hi, "ConstraintSet::box");
  require_finite(lo, "ConstraintSet::box");
  require_finite(hi, "ConstraintSet::box");
  for (Index i = 0; i < lo.size(); ++i) {
    if (lo[i] > hi[i]) throw InvalidArgument("ConstraintSet::box: lo > hi at index " + std::to_string(i));
  }
  return ConstraintSet(Box{std::move(lo), std::move(hi)});
}

ConstraintSet ConstraintSet::uniform_box(Index d, double lo, double hi) {
  return box(Vector::Constant(d, lo), Vector::Constant(d, hi));
}

ConstraintSet ConstraintSet::symmetric_band(Vector a, double b) {
  require_finite(a, "ConstraintSet::symmetric_band");
  if (squared_norm(a) == 0.0) throw InvalidArgument("ConstraintSet::symmetric_band: a must be nonzero");
  if (!(b > 0.0) || !std::isfinite(b)) throw InvalidArgument("ConstraintSet::symmetric_band: b must be positive");
  return ConstraintSet(SymmetricBand{std::move(a), b});
}

ConstraintSet ConstraintSet::l2_ball(Vector center, double radius) {
  require_finite(center, "ConstraintSet::l2_ball");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidArgument("ConstraintSet::l2_ball: radius must be positive");
  return ConstraintSet(L2Ball{std::move(center), radius});
}

std::string ConstraintSet::name() const {
  return std::visit(overloaded{[](const Unconstrained&) { return std::string("unconstrained"); },
                               [](const Box&) { return std::string("box"); },
                               [](const SymmetricBand&) { return std::string("symmetric-band"); },
                               [](const L2Ball&) { return std::string("l2-ball"); }},
                    set_);
}

DiagonalMetric::DiagonalMetric(Vector h) : h_(std::move(h)) {
  if (h_.size() < 1) throw InvalidArgument("DiagonalMetric: empty weight vector");
  for (Index i = 0; i < h_.size(); ++i) {
    if (!(h_[i] > 0.0) || !std::isfinite(h_[i])) {
      throw InvalidArgument("DiagonalMetric: weights must be positive and finite");
    }
  }
}

DiagonalMetric DiagonalMetric::identity(Index d) { return DiagonalMetric(Vector::Ones(d)); }

DiagonalMetric DiagonalMetric::from_second_moment(const Vector& v_hat) {
  return DiagonalMetric(v_hat.cwiseSqrt());
}

bool DiagonalMetric::is_uniform() const {
  for (Index i = 1; i < h_.size(); ++i) {
    if (h_[i] != h_[0]) return false;
  }
  return true;
}

bool is_member(const ConstraintSet& set, const Vector& x, double tol) {
  return std::visit(
      overloaded{[&](const Unconstrained&) { return true; },
                 [&](const Box& box) {
                   require_same_dim(box.lo, x, "is_member");
                   for (Index i = 0; i < x.size(); ++i) {
                     if (x[i] < box.lo[i] - tol || x[i] > box.hi[i] + tol) return false;
                   }
                   return true;
                 },
                 [&](const SymmetricBand& band) {
                   require_same_dim(band.a, x, "is_member");
                   return std::abs(dot(band.a, x)) <= band.b + tol;
                 },
                 [&](const L2Ball& ball) {
                   require_same_dim(ball.center, x, "is_member");
                   return norm(Vector(x - ball.center)) <= ball.radius + tol;
                 }},
      set.variant());
}

Vector project_euclidean(const ConstraintSet& set, const Vector& y) {
  return std::visit(
      overloaded{[&](const Unconstrained&) { return y; },
                 [&](const Box& box) { return clamp(box, y); },
                 [&](const SymmetricBand& band) {
                   return band_weighted(band, Vector::Ones(y.size()), y);
                 },
                 [&](const L2Ball& ball) { return ball_euclidean(ball, y); }},
      set.variant());
}

Vector project_mahalanobis(const ConstraintSet& set, const DiagonalMetric& metric,
                           const Vector& y) {
  require_same_dim(metric.weights(), y, "project_mahalanobis");
  const Vector& h = metric.weights();
  return std::visit(
      overloaded{[&](const Unconstrained&) { return y; },
                 [&](const Box& box) { return clamp(box, y); },
                 [&](const SymmetricBand& band) { return band_weighted(band, h, y); },
                 [&](const L2Ball& ball) {
                   return metric.is_uniform() ? ball_euclidean(ball, y) : ball_weighted(ball, h, y);
                 }},
      set.variant());
}

Vector gradient_mapping(const ConstraintSet& set, const DiagonalMetric& metric,
                        const Vector& x_minus, const Vector& g, double omega) {
  if (!(omega > 0.0)) throw InvalidArgument("gradient_mapping: omega must be positive");
  require_same_dim(x_minus, g, "gradient_mapping");
  require_same_dim(metric.weights(), g, "gradient_mapping");
  const Vector scaled = g.cwiseQuotient(metric.weights());
  if (set.is_unconstrained()) return scaled;
  const Vector x_plus = project_mahalanobis(set, metric, x_minus - omega * scaled);
  return (x_minus - x_plus) / omega;
}

double mahalanobis_measure(const ConstraintSet& set, const DiagonalMetric& metric,
                           const Vector& x, const Vector& grad, double alpha) {
  if (!(alpha > 0.0)) throw InvalidArgument("mahalanobis_measure: alpha must be positive");
  const Vector& h = metric.weights();
  if (set.is_unconstrained()) {
    require_same_dim(h, grad, "mahalanobis_measure");
    double acc = 0.0;
    for (Index i = 0; i < grad.size(); ++i) acc += grad[i] * grad[i] / h[i];
    return acc;
  }
  const Vector p = gradient_mapping(set, metric, x, grad, alpha);
  double acc = 0.0;
  for (Index i = 0; i < p.size(); ++i) acc += h[i] * p[i] * p[i];
  return acc;
}

double vi_violation(const Vector& grad, const Vector& x_star, const Vector& x_test) {
  require_same_dim(x_star, x_test, "vi_violation");
  return dot(grad, Vector(x_test - x_star));
}

}  // namespace zoopt
