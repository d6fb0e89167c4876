#include "zoopt/estimators.hpp"

#include <algorithm>
#include <numeric>

namespace zoopt {

namespace {

void require_dim(const StochasticObjective& obj, const Vector& x, const char* what) {
  if (x.size() != obj.dim()) {
    throw InvalidArgument(std::string(what) + ": point has dimension " +
                          std::to_string(x.size()) + ", objective expects " +
                          std::to_string(obj.dim()));
  }
}

Vector checked(Vector g, const Vector& x, const char* what) {
  if (!all_finite(g)) {
    throw NumericError(std::string(what) + ": non-finite gradient estimate", to_std(x));
  }
  return g;
}

Vector draw_direction(Index d, DirectionKind kind, RngStream& rng) {
  return kind == DirectionKind::Sphere ? sample_unit_sphere(d, rng) : sample_gaussian(d, rng);
}

}  // namespace

double effective_mu(double mu, double mu_floor) {
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw InvalidArgument("smoothing parameter mu must be positive and finite, got " +
                          std::to_string(mu));
  }
  return std::max(mu, mu_floor);
}

Vector two_point_uniform(const StochasticObjective& obj, const Vector& x, SampleIndex xi,
                         double mu, RngStream& rng, double mu_floor) {
  require_dim(obj, x, "two_point_uniform");
  const double m = effective_mu(mu, mu_floor);
  const Index d = obj.dim();
  const Vector u = sample_unit_sphere(d, rng);
  const double shifted = obj.evaluate(x + m * u, xi);
  const double base = obj.evaluate(x, xi);
  const double scale = static_cast<double>(d) / m * (shifted - base);
  return checked(scale * u, x, "two_point_uniform");
}

Vector averaged_estimator_on_batch(const StochasticObjective& obj, const Vector& x,
                                   const std::vector<SampleIndex>& batch, double mu,
                                   std::size_t q, RngStream& rng, DirectionKind direction,
                                   double mu_floor) {
  require_dim(obj, x, "averaged_estimator");
  if (batch.empty()) throw InvalidArgument("averaged_estimator: b must be positive");
  if (q == 0) throw InvalidArgument("averaged_estimator: q must be positive");
  const double m = effective_mu(mu, mu_floor);
  const Index d = obj.dim();

  std::vector<Vector> dirs;
  dirs.reserve(q);
  for (std::size_t i = 0; i < q; ++i) dirs.push_back(draw_direction(d, direction, rng));

  const double dim_factor = direction == DirectionKind::Sphere ? static_cast<double>(d) : 1.0;
  std::vector<double> coeff(q, 0.0);
  for (const SampleIndex xi : batch) {
    for (std::size_t i = 0; i < q; ++i) {
      coeff[i] += obj.evaluate(x + m * dirs[i], xi);
    }
    const double base = obj.evaluate(x, xi);
    for (std::size_t i = 0; i < q; ++i) coeff[i] -= base;
  }

  const double norm_factor = dim_factor / (m * static_cast<double>(batch.size() * q));
  Vector g = Vector::Zero(d);
  for (std::size_t i = 0; i < q; ++i) g += (norm_factor * coeff[i]) * dirs[i];
  return checked(std::move(g), x, "averaged_estimator");
}

Vector averaged_estimator(const StochasticObjective& obj, const Vector& x, double mu,
                          std::size_t b, std::size_t q, RngStream& rng, DirectionKind direction,
                          double mu_floor) {
  const auto batch = sample_minibatch(obj, b, rng);
  return averaged_estimator_on_batch(obj, x, batch, mu, q, rng, direction, mu_floor);
}

Vector coordinate_estimate(const StochasticObjective& obj, const Vector& x, SampleIndex xi,
                           double mu, const std::vector<Index>& coords, double mu_floor) {
  require_dim(obj, x, "coordinate_estimate");
  if (coords.empty()) throw InvalidArgument("coordinate_estimate: empty coordinate list");
  std::vector<Index> sorted = coords;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvalidArgument("coordinate_estimate: duplicate coordinate index");
  }
  if (sorted.front() < 0 || sorted.back() >= obj.dim()) {
    throw InvalidArgument("coordinate_estimate: coordinate index out of range");
  }
  const double m = effective_mu(mu, mu_floor);
  Vector g = Vector::Zero(obj.dim());
  Vector probe = x;
  for (const Index i : coords) {
    probe[i] = x[i] + m;
    const double up = obj.evaluate(probe, xi);
    probe[i] = x[i] - m;
    const double down = obj.evaluate(probe, xi);
    probe[i] = x[i];
    g[i] = (up - down) / (2.0 * m);
  }
  return checked(std::move(g), x, "coordinate_estimate");
}

Vector nes_antithetic_from_directions(const StochasticObjective& obj, const Vector& x,
                                      SampleIndex xi, double mu,
                                      const std::vector<Vector>& directions, double mu_floor) {
  require_dim(obj, x, "nes_antithetic_estimate");
  if (directions.empty()) throw InvalidArgument("nes_antithetic_estimate: q must be positive");
  const double m = effective_mu(mu, mu_floor);
  Vector g = Vector::Zero(obj.dim());
  for (const Vector& u : directions) {
    require_same_dim(u, x, "nes_antithetic_estimate");
    const double diff = obj.evaluate(x + m * u, xi) - obj.evaluate(x - m * u, xi);
    g += diff * u;
  }
  g /= 2.0 * static_cast<double>(directions.size()) * m;
  return checked(std::move(g), x, "nes_antithetic_estimate");
}

Vector nes_antithetic_estimate(const StochasticObjective& obj, const Vector& x, SampleIndex xi,
                               double mu, std::size_t q, RngStream& rng, double mu_floor) {
  if (q == 0) throw InvalidArgument("nes_antithetic_estimate: q must be positive");
  std::vector<Vector> dirs;
  dirs.reserve(q);
  for (std::size_t i = 0; i < q; ++i) dirs.push_back(sample_gaussian(obj.dim(), rng));
  return nes_antithetic_from_directions(obj, x, xi, mu, dirs, mu_floor);
}

std::vector<Index> sample_coordinates(Index d, std::size_t k, RngStream& rng) {
  if (d < 1) throw InvalidArgument("sample_coordinates: invalid dimension");
  if (k == 0 || k > static_cast<std::size_t>(d)) {
    throw InvalidArgument("sample_coordinates: k must lie in [1, d]");
  }
  std::vector<Index> pool(static_cast<std::size_t>(d));
  std::iota(pool.begin(), pool.end(), Index{0});
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace zoopt
