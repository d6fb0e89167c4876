#pragma once

// Dense vector helpers and the pinned random stream shared by every module.
//
// Reductions (dot, sum, norms) are written as explicit left-to-right loops
// instead of Eigen's vectorised reductions so that traces are bitwise
// reproducible regardless of the SIMD width the library was built with.

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "zoopt/errors.hpp"

namespace zoopt {

template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Vector = DenseVector<double>;
using Index = Eigen::Index;

template <typename A, typename B>
void require_same_dim(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b,
                      const char* what) {
  if (a.size() != b.size()) {
    throw InvalidArgument(std::string(what) + ": dimension mismatch (" +
                          std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
}

template <typename A, typename B>
typename A::Scalar dot(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  require_same_dim(a, b, "dot");
  typename A::Scalar acc(0);
  for (Index i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

template <typename A>
typename A::Scalar sum(const Eigen::MatrixBase<A>& a) {
  typename A::Scalar acc(0);
  for (Index i = 0; i < a.size(); ++i) acc += a[i];
  return acc;
}

template <typename A>
typename A::Scalar squared_norm(const Eigen::MatrixBase<A>& a) {
  typename A::Scalar acc(0);
  for (Index i = 0; i < a.size(); ++i) acc += a[i] * a[i];
  return acc;
}

template <typename A>
typename A::Scalar norm(const Eigen::MatrixBase<A>& a) {
  using std::sqrt;
  return sqrt(squared_norm(a));
}

/// Weighted squared distance sum_i w_i (a_i - b_i)^2.
template <typename W, typename A, typename B>
typename A::Scalar weighted_squared_distance(const Eigen::MatrixBase<W>& w,
                                             const Eigen::MatrixBase<A>& a,
                                             const Eigen::MatrixBase<B>& b) {
  require_same_dim(a, b, "weighted_squared_distance");
  require_same_dim(w, a, "weighted_squared_distance");
  typename A::Scalar acc(0);
  for (Index i = 0; i < a.size(); ++i) {
    const auto diff = a[i] - b[i];
    acc += w[i] * diff * diff;
  }
  return acc;
}

/// Componentwise max(a, b).
template <typename A, typename B>
DenseVector<typename A::Scalar> elementwise_max(const Eigen::MatrixBase<A>& a,
                                                const Eigen::MatrixBase<B>& b) {
  require_same_dim(a, b, "elementwise_max");
  return a.cwiseMax(b);
}

/// Componentwise sign with sign(0) = 0.
template <typename A>
DenseVector<typename A::Scalar> sign(const Eigen::MatrixBase<A>& a) {
  using Scalar = typename A::Scalar;
  DenseVector<Scalar> out(a.size());
  for (Index i = 0; i < a.size(); ++i) {
    out[i] = a[i] > Scalar(0) ? Scalar(1) : (a[i] < Scalar(0) ? Scalar(-1) : Scalar(0));
  }
  return out;
}

template <typename A>
bool all_finite(const Eigen::MatrixBase<A>& a) {
  for (Index i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i])) return false;
  }
  return true;
}

inline std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

inline Vector from_std(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
/// easy as 1, 2, 3"). Exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// Counter-based random stream.
///
/// The key is the 64-bit seed, the upper half of the 128-bit counter is a
/// stream id and the lower half a block counter, so `RngStream(s, k)` for
/// distinct k are independent sub-streams of the same seed. Each Philox block
/// yields two 64-bit words. Doubles use the top 53 bits; normals use the
/// Box-Muller transform with the sine branch cached.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();
  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on (0, 1].
  double uniform_positive();
  double normal();
  /// Uniform integer on [0, n). Requires n > 0.
  std::uint64_t below(std::uint64_t n);

  /// Independent stream derived from this stream's seed and `stream_id`.
  RngStream substream(std::uint64_t stream_id) const;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

/// Uniform direction on the unit sphere S^{d-1}.
Vector sample_unit_sphere(Index d, RngStream& rng);

/// Uniform point in the closed unit ball.
Vector sample_unit_ball(Index d, RngStream& rng);

/// Standard normal vector.
Vector sample_gaussian(Index d, RngStream& rng);

}  // namespace zoopt
