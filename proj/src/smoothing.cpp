#include "zoopt/smoothing.hpp"

#include <cmath>
#include <string>

namespace zoopt {

namespace {

struct Welford {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double v) {
    ++n;
    const double delta = v - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (v - mean);
  }
  double std_error() const {
    if (n < 2) return 0.0;
    return std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
  }
};

}  // namespace

void SmoothingProbe::validate() const {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw InvalidArgument("SmoothingProbe: mu must be positive");
  if (samples < 1) throw InvalidArgument("SmoothingProbe: samples must be >= 1");
  if (!(mu_floor >= 0.0)) throw InvalidArgument("SmoothingProbe: mu_floor must be >= 0");
}

MonteCarloValue smooth_value_mc(const StochasticObjective& obj, const Vector& x, SampleIndex xi,
                                const SmoothingProbe& probe) {
  probe.validate();
  const double m = effective_mu(probe.mu, probe.mu_floor);
  RngStream rng(probe.seed);
  Welford acc;
  for (std::uint64_t k = 0; k < probe.samples; ++k) {
    const Vector u = sample_unit_ball(obj.dim(), rng);
    acc.add(obj.evaluate(x + m * u, xi));
  }
  return {acc.mean, acc.std_error()};
}

MonteCarloGradient smooth_grad_mc(const StochasticObjective& obj, const Vector& x, SampleIndex xi,
                                  const SmoothingProbe& probe) {
  probe.validate();
  const Index d = obj.dim();
  RngStream rng(probe.seed);
  std::vector<Welford> coords(static_cast<std::size_t>(d));
  Welford second;
  for (std::uint64_t k = 0; k < probe.samples; ++k) {
    const Vector g = two_point_uniform(obj, x, xi, probe.mu, rng, probe.mu_floor);
    for (Index i = 0; i < d; ++i) coords[static_cast<std::size_t>(i)].add(g[i]);
    second.add(squared_norm(g));
  }
  MonteCarloGradient out;
  out.mean.resize(d);
  out.std_error.resize(d);
  for (Index i = 0; i < d; ++i) {
    out.mean[i] = coords[static_cast<std::size_t>(i)].mean;
    out.std_error[i] = coords[static_cast<std::size_t>(i)].std_error();
  }
  out.second_moment = second.mean;
  out.second_moment_std_error = second.std_error();
  return out;
}

SmoothQuadratic analytic_smooth_quadratic(const Vector& a_diag, const Vector& b, const Vector& x,
                                          double mu) {
  require_same_dim(a_diag, b, "analytic_smooth_quadratic");
  require_same_dim(a_diag, x, "analytic_smooth_quadratic");
  if (!(mu >= 0.0)) throw InvalidArgument("analytic_smooth_quadratic: mu must be >= 0");
  const Index d = x.size();
  double value = 0.0;
  for (Index i = 0; i < d; ++i) value += 0.5 * a_diag[i] * x[i] * x[i] + b[i] * x[i];
  value += mu * mu * sum(a_diag) / (2.0 * static_cast<double>(d + 2));
  return {value, Vector(a_diag.cwiseProduct(x) + b)};
}

}  // namespace zoopt
