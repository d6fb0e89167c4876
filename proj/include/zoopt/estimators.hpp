#pragma once

#include <cstddef>
#include <vector>

#include "zoopt/numkit.hpp"
#include "zoopt/oracle.hpp"

namespace zoopt {

/// Smallest smoothing radius used by any estimator; smaller requests are clamped.
inline constexpr double kDefaultMuFloor = 1e-8;

enum class EstimatorKind { UniformTwoPoint, Coordinate, NesAntithetic };

/// Distribution of random directions for the two-point estimators. Sphere is
/// the default; Gaussian is kept for ablations (scale 1/mu instead of d/mu).
enum class DirectionKind { Sphere, Gaussian };

struct EstimatorConfig {
  double mu = 0.005;
  std::size_t b = 1;
  std::size_t q = 10;
  EstimatorKind kind = EstimatorKind::UniformTwoPoint;
  DirectionKind direction = DirectionKind::Sphere;
  double mu_floor = kDefaultMuFloor;
};

/// Validates mu > 0 and clamps it to the floor.
double effective_mu(double mu, double mu_floor = kDefaultMuFloor);

/// (d/mu) [f(x + mu u; xi) - f(x; xi)] u with u uniform on the sphere. Two queries.
Vector two_point_uniform(const StochasticObjective& obj, const Vector& x, SampleIndex xi,
                         double mu, RngStream& rng, double mu_floor = kDefaultMuFloor);

/// Minibatch/multi-direction average over an explicit batch. The q directions
/// are shared across the batch and f(x; xi_j) is evaluated once per sample:
/// b (q + 1) queries.
Vector averaged_estimator_on_batch(const StochasticObjective& obj, const Vector& x,
                                   const std::vector<SampleIndex>& batch, double mu,
                                   std::size_t q, RngStream& rng,
                                   DirectionKind direction = DirectionKind::Sphere,
                                   double mu_floor = kDefaultMuFloor);

/// Draws a minibatch of size b, then `averaged_estimator_on_batch`.
Vector averaged_estimator(const StochasticObjective& obj, const Vector& x, double mu,
                          std::size_t b, std::size_t q, RngStream& rng,
                          DirectionKind direction = DirectionKind::Sphere,
                          double mu_floor = kDefaultMuFloor);

/// Central differences on the listed coordinates; zeros elsewhere. 2|coords| queries.
Vector coordinate_estimate(const StochasticObjective& obj, const Vector& x, SampleIndex xi,
                           double mu, const std::vector<Index>& coords,
                           double mu_floor = kDefaultMuFloor);

/// Antithetic NES estimate (1/(2 q mu)) sum_i [f(x + mu u_i) - f(x - mu u_i)] u_i
/// with standard Gaussian u_i. 2q queries.
Vector nes_antithetic_estimate(const StochasticObjective& obj, const Vector& x, SampleIndex xi,
                               double mu, std::size_t q, RngStream& rng,
                               double mu_floor = kDefaultMuFloor);

/// NES estimate from explicit directions; used to check antithetic symmetry.
Vector nes_antithetic_from_directions(const StochasticObjective& obj, const Vector& x,
                                      SampleIndex xi, double mu,
                                      const std::vector<Vector>& directions,
                                      double mu_floor = kDefaultMuFloor);

/// k distinct coordinates out of d, uniformly without replacement (partial Fisher-Yates).
std::vector<Index> sample_coordinates(Index d, std::size_t k, RngStream& rng);

}  // namespace zoopt
