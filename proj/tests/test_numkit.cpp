#include <doctest.h>

#include <cmath>
#include <set>

#include "zoopt/numkit.hpp"

using namespace zoopt;

TEST_CASE("philox known answers") {
  using Block = std::array<std::uint32_t, 4>;
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("rng streams are reproducible and distinct") {
  RngStream a(42), b(42), c(43), s(42, 1);
  bool differ_seed = false, differ_stream = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differ_seed = differ_seed || x != c.next_u64();
    differ_stream = differ_stream || x != s.next_u64();
  }
  CHECK(differ_seed);
  CHECK(differ_stream);

  RngStream u(5);
  for (int i = 0; i < 10000; ++i) {
    const double v = u.uniform();
    REQUIRE(v >= 0.0);
    REQUIRE(v < 1.0);
    const double p = u.uniform_positive();
    REQUIRE(p > 0.0);
    REQUIRE(p <= 1.0);
    REQUIRE(u.below(7) < 7);
  }
  CHECK_THROWS_AS(u.below(0), InvalidArgument);
}

TEST_CASE("normal draws have unit variance") {
  RngStream rng(11);
  constexpr int n = 200000;
  double mean = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    mean += z;
    sq += z * z;
  }
  mean /= n;
  sq /= n;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(n));
  CHECK(std::abs(sq - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("sample_unit_sphere") {
  RngStream rng(3);
  SUBCASE("d = 1 is a fair sign") {
    int plus = 0;
    for (int i = 0; i < 10000; ++i) {
      const Vector u = sample_unit_sphere(1, rng);
      REQUIRE(std::abs(u[0]) == 1.0);
      plus += u[0] > 0.0;
    }
    CHECK(std::abs(plus / 10000.0 - 0.5) <= 0.01);
  }
  SUBCASE("unit norm") {
    for (int i = 0; i < 1000; ++i) REQUIRE(std::abs(norm(sample_unit_sphere(3, rng)) - 1.0) <= 1e-12);
  }
  SUBCASE("coordinate means vanish at d = 5") {
    Vector mean = Vector::Zero(5);
    for (int i = 0; i < 100000; ++i) mean += sample_unit_sphere(5, rng);
    mean /= 100000.0;
    CHECK(mean.cwiseAbs().maxCoeff() <= 0.01);
  }
  CHECK_THROWS_AS(sample_unit_sphere(0, rng), InvalidArgument);
}

TEST_CASE("sample_unit_ball") {
  RngStream rng(4);
  SUBCASE("d = 1 is uniform on [-1, 1]") {
    double mean = 0.0;
    for (int i = 0; i < 100000; ++i) mean += sample_unit_ball(1, rng)[0];
    CHECK(std::abs(mean / 100000.0) <= 0.01);
  }
  SUBCASE("second moment at d = 2") {
    double acc = 0.0;
    for (int i = 0; i < 100000; ++i) acc += squared_norm(sample_unit_ball(2, rng));
    CHECK(std::abs(acc / 100000.0 - 0.5) <= 0.01);
  }
  SUBCASE("inside the ball") {
    for (Index d : {1, 2, 7, 30}) {
      for (int i = 0; i < 1000; ++i) REQUIRE(norm(sample_unit_ball(d, rng)) <= 1.0);
    }
  }
  CHECK_THROWS_AS(sample_unit_ball(0, rng), InvalidArgument);
}

TEST_CASE("elementwise_max") {
  CHECK(elementwise_max(Vector{{1.0, 5.0}}, Vector{{3.0, 2.0}}) == Vector{{3.0, 5.0}});
  const Vector a{{0.3, -2.0, 7.0}};
  CHECK(elementwise_max(a, a) == a);
  CHECK(elementwise_max(Vector{{-1.0, 0.0}}, Vector{{0.0, -1.0}}) == Vector{{0.0, 0.0}});
  CHECK_THROWS_AS(elementwise_max(Vector{{1.0}}, Vector{{1.0, 2.0}}), InvalidArgument);
}

TEST_CASE("reductions and sign") {
  const Vector a{{1.0, -2.0, 3.0}};
  const Vector b{{4.0, 0.5, -1.0}};
  CHECK(dot(a, b) == doctest::Approx(0.0));
  CHECK(sum(a) == 2.0);
  CHECK(squared_norm(a) == 14.0);
  CHECK(weighted_squared_distance(Vector{{1.0, 2.0, 0.0}}, a, b) == doctest::Approx(9.0 + 12.5));
  CHECK(sign(Vector{{-0.1, 0.0, 2.0}}) == Vector{{-1.0, 0.0, 1.0}});
  CHECK_THROWS_AS(dot(a, Vector{{1.0}}), InvalidArgument);
  CHECK(all_finite(a));
  CHECK_FALSE(all_finite(Vector{{1.0, std::nan("")}}));
  CHECK(from_std(to_std(a)) == a);
}
