#include <random>

#include "doctest.h"
#include "kinetic/group.hpp"
#include "support.hpp"

using namespace kinetic;
using testing_support::near;
using testing_support::random_point;

TEST_CASE("compose follows the Galilean product") {
  CHECK(compose(Point(1, 0, 1), Point(1, 0, 0)) == Point(2, 1, 1));
  const Point z(0.3, -1.2, 2.5);
  CHECK(compose(z, Point::zero(1)) == z);
  CHECK(compose(Point::zero(1), z) == z);
  const Point a(1, 0, 1), b(1, 0, 0), c(1, 2, 3);
  CHECK(compose(compose(a, b), c) == compose(a, compose(b, c)));
  CHECK_THROWS_AS(compose(Point(1, 0, 0), Point(0, {0, 0}, {0, 0})), std::invalid_argument);
}

TEST_CASE("inverse") {
  CHECK(inverse(Point(1, 2, 3)) == Point(-1, 1, -3));
  CHECK(inverse(Point::zero(2)) == Point::zero(2));
  std::mt19937_64 rng(7);
  for (int d = 1; d <= 3; ++d) {
    for (int i = 0; i < 200; ++i) {
      const Point z = random_point(rng, d, 3.0);
      CHECK(near(inverse(inverse(z)), z, 1e-14));
      CHECK(near(compose(z, inverse(z)), Point::zero(d), 1e-13));
      CHECK(near(compose(inverse(z), z), Point::zero(d), 1e-13));
    }
  }
}

TEST_CASE("scaling and homogeneous norm") {
  const ScalingExponent half(0.5);
  CHECK(scale(2.0, Point(1, 1, 1), half) == Point(2, 4, 2));
  CHECK_THROWS_AS(scale(0.0, Point(1, 1, 1), half), std::invalid_argument);
  CHECK(knorm(Point(-1, 0, 0), half) == doctest::Approx(1.0));
  CHECK(knorm(Point(0, 16, 0), half) == doctest::Approx(4.0));

  std::mt19937_64 rng(11);
  for (double sv : {0.25, 0.5, 0.75, 0.3}) {
    const ScalingExponent s(sv);
    for (int i = 0; i < 100; ++i) {
      const Point z = random_point(rng, 2, 2.0);
      CHECK(near(scale(1.0, z, s), z, 0.0));
      CHECK(near(scale(2.0, scale(0.5, z, s), s), z, 1e-13));
      CHECK(knorm(scale(3.0, z, s), s) == doctest::Approx(3.0 * knorm(z, s)).epsilon(1e-12));
      // S_R is a group automorphism.
      const Point w = random_point(rng, 2, 2.0);
      CHECK(near(scale(1.7, compose(z, w), s), compose(scale(1.7, z, s), scale(1.7, w, s)), 1e-12));
    }
  }
}

TEST_CASE("scaling exponent validation and rational detection") {
  CHECK_THROWS_AS(ScalingExponent(0.0), std::invalid_argument);
  CHECK_THROWS_AS(ScalingExponent(1.0), std::invalid_argument);
  REQUIRE(ScalingExponent(0.75).rational().has_value());
  CHECK(ScalingExponent(0.75).rational()->first == 3);
  CHECK(ScalingExponent(0.75).rational()->second == 4);
  CHECK_FALSE(ScalingExponent(1.0 / std::sqrt(2.0)).rational().has_value());
}

TEST_CASE("points round-trip through flat records") {
  const Point z(0.5, {1.0, 2.0}, {-3.0, 4.0});
  const auto rec = z.flat();
  CHECK(rec.size() == 5);
  CHECK(Point::from_flat(rec, 2) == z);
  CHECK_THROWS_AS(Point::from_flat(rec, 1), std::invalid_argument);
  CHECK_THROWS_AS(Point(NAN, 0.0, 0.0), std::invalid_argument);
}
