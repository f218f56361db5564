#pragma once

// Dense revised simplex for small linear programs of the form
//
//   minimize c^T x   subject to   A x <= b,   x free,
//
// with few variables and many constraints. The solver works on the dual
// standard-form problem (n equality rows, m nonnegative columns), so the
// basis is only n x n; x is recovered from the simplex multipliers.

#include <Eigen/Dense>

namespace kinetic {

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

const char* to_string(LpStatus status) noexcept;

struct LpOptions {
  int max_iterations = 100000;
  double optimality_tol = 1e-11;
  double pivot_tol = 1e-11;
  // Consecutive degenerate pivots before switching to Bland's rule.
  int degenerate_switch = 40;
};

struct LpResult {
  LpStatus status = LpStatus::iteration_limit;
  Eigen::VectorXd x;
  double objective = 0.0;
  int iterations = 0;
};

LpResult solve_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                  const LpOptions& options = {});

}  // namespace kinetic
