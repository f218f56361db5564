#pragma once

#include <random>

#include "kinetic/group.hpp"

namespace testing_support {

inline kinetic::Point random_point(std::mt19937_64& rng, int d, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  kinetic::Point z = kinetic::Point::zero(d);
  z.t = u(rng);
  for (int i = 0; i < d; ++i) {
    z.x[i] = u(rng);
    z.v[i] = u(rng);
  }
  return z;
}

inline bool near(const kinetic::Point& a, const kinetic::Point& b, double tol) {
  if (a.d != b.d || std::abs(a.t - b.t) > tol) return false;
  for (int i = 0; i < a.d; ++i) {
    if (std::abs(a.x[i] - b.x[i]) > tol || std::abs(a.v[i] - b.v[i]) > tol) return false;
  }
  return true;
}

}  // namespace testing_support
