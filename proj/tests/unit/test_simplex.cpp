#include <cmath>
#include <random>

#include "doctest.h"
#include "kinetic/simplex.hpp"

using namespace kinetic;

namespace {

// Vertex enumeration for two-variable problems.
double brute_force_2d(const Eigen::Vector2d& c, const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  double best = INFINITY;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < A.rows(); ++j) {
      Eigen::Matrix2d M;
      M.row(0) = A.row(i);
      M.row(1) = A.row(j);
      if (std::abs(M.determinant()) < 1e-12) continue;
      const Eigen::Vector2d x = M.inverse() * (Eigen::Vector2d(b[i], b[j]));
      if (((A * x - b).array() <= 1e-9).all()) best = std::min(best, c.dot(x));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("simplex on a textbook problem") {
  // max x + y  s.t.  x + 2y <= 4, 3x + y <= 6, x >= 0, y >= 0  -> (8/5, 6/5), value 14/5.
  Eigen::MatrixXd A(4, 2);
  A << 1, 2, 3, 1, -1, 0, 0, -1;
  Eigen::VectorXd b(4);
  b << 4, 6, 0, 0;
  const auto res = solve_lp(Eigen::Vector2d(-1, -1), A, b);
  REQUIRE(res.status == LpStatus::optimal);
  CHECK(res.x[0] == doctest::Approx(1.6));
  CHECK(res.x[1] == doctest::Approx(1.2));
  CHECK(res.objective == doctest::Approx(-2.8));
}

TEST_CASE("simplex matches vertex enumeration on random bounded problems") {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 6 + trial % 20;
    Eigen::MatrixXd A(m + 4, 2);
    Eigen::VectorXd b(m + 4);
    for (int i = 0; i < m; ++i) {
      A(i, 0) = g(rng);
      A(i, 1) = g(rng);
      b[i] = std::abs(g(rng)) + 0.1;
    }
    A.bottomRows(4) << 1, 0, -1, 0, 0, 1, 0, -1;
    b.tail(4).setConstant(10.0);
    const Eigen::Vector2d c(g(rng), g(rng));
    const auto res = solve_lp(c, A, b);
    REQUIRE(res.status == LpStatus::optimal);
    CHECK(((A * res.x - b).array() <= 1e-9).all());
    CHECK(res.objective == doctest::Approx(brute_force_2d(c, A, b)).epsilon(1e-9));
  }
}

TEST_CASE("simplex detects unbounded and infeasible problems") {
  Eigen::MatrixXd A(1, 1);
  A << -1;
  CHECK(solve_lp(Eigen::VectorXd::Constant(1, -1.0), A, Eigen::VectorXd::Zero(1)).status ==
        LpStatus::unbounded);
  Eigen::MatrixXd B(2, 1);
  B << 1, -1;
  Eigen::VectorXd rhs(2);
  rhs << -1, -1;  // x <= -1 and x >= 1
  CHECK(solve_lp(Eigen::VectorXd::Constant(1, 1.0), B, rhs).status == LpStatus::infeasible);
}

TEST_CASE("Chebyshev fit of a line through a parabola") {
  // min_{a,b} max_k |x_k^2 - a - b x_k| on [-1,1]: optimum 1/2 at a = 1/2, b = 0.
  const int n = 201;
  Eigen::MatrixXd A(2 * n, 3);
  Eigen::VectorXd b(2 * n);
  for (int k = 0; k < n; ++k) {
    const double x = -1.0 + 2.0 * k / (n - 1);
    A.row(2 * k) << -1, -x, -1;
    b[2 * k] = -x * x;
    A.row(2 * k + 1) << 1, x, -1;
    b[2 * k + 1] = x * x;
  }
  const auto res = solve_lp(Eigen::Vector3d(0, 0, 1), A, b);
  REQUIRE(res.status == LpStatus::optimal);
  CHECK(res.x[2] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(res.x[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(res.x[1]) < 1e-12);
}
