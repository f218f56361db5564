#include "kinetic/sampling.hpp"

#include <array>
#include <stdexcept>

namespace kinetic {

double radical_inverse(unsigned long k, unsigned base) noexcept {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (k > 0) {
    r += f * static_cast<double>(k % base);
    k /= base;
    f *= inv;
  }
  return r;
}

std::vector<std::vector<double>> halton(int dim, int n, unsigned long skip) {
  static constexpr std::array<unsigned, 16> primes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
  if (dim < 1 || dim > static_cast<int>(primes.size())) throw std::invalid_argument("halton: dim out of range");
  std::vector<std::vector<double>> out(n, std::vector<double>(dim));
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < dim; ++i) out[k][i] = radical_inverse(skip + k, primes[i]);
  }
  return out;
}

std::vector<Point> unit_ball_samples(int d, int n, bool include_extremes) {
  check_dim(d);
  std::vector<Point> out;
  if (include_extremes) {
    // Every combination of t in {-1,0,1} and x, v in {0, +-e_i}.
    std::vector<Vec> dirs{Vec{}};
    for (int i = 0; i < d; ++i) {
      Vec e{};
      e[i] = 1.0;
      dirs.push_back(e);
      e[i] = -1.0;
      dirs.push_back(e);
    }
    for (double t : {-1.0, 0.0, 1.0}) {
      for (const auto& ex : dirs) {
        for (const auto& ev : dirs) {
          Point z = Point::zero(d);
          z.t = t;
          z.x = ex;
          z.v = ev;
          out.push_back(z);
        }
      }
    }
  }
  // Rejection from the cube keeps the low-discrepancy structure for d = 1 and most of it otherwise.
  unsigned long k = 1;
  const std::size_t target = out.size() + static_cast<std::size_t>(n);
  const int dim = 1 + 2 * d;
  static constexpr std::array<unsigned, 7> primes{2, 3, 5, 7, 11, 13, 17};
  while (out.size() < target && k < 100ul * static_cast<unsigned long>(n) + 1000ul) {
    std::array<double, 7> u{};
    for (int i = 0; i < dim; ++i) u[i] = 2.0 * radical_inverse(k, primes[i]) - 1.0;
    ++k;
    Point z = Point::zero(d);
    z.t = u[0];
    for (int i = 0; i < d; ++i) {
      z.x[i] = u[1 + i];
      z.v[i] = u[1 + d + i];
    }
    if (norm(z.x, d) > 1.0 || norm(z.v, d) > 1.0) continue;
    out.push_back(z);
  }
  return out;
}

}  // namespace kinetic
