#include "kinetic/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace kinetic {

const char* to_string(LpStatus status) noexcept {
  switch (status) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::iteration_limit: return "iteration_limit";
  }
  return "unknown";
}

namespace {

// Dual problem: min g^T y  s.t.  G y = r, y >= 0, with G = diag(sign) A^T (rows normalized)
// and artificial identity columns appended after the m structural ones.
class DualSimplex {
 public:
  DualSimplex(const Eigen::MatrixXd& G, const Eigen::VectorXd& g, const Eigen::VectorXd& r,
              const LpOptions& opt)
      : G_(G), g_(g), r_(r), opt_(opt), n_(static_cast<int>(G.rows())),
        m_(static_cast<int>(G.cols())) {
    basis_.resize(n_);
    for (int i = 0; i < n_; ++i) basis_[i] = m_ + i;
    in_basis_.assign(m_ + n_, -1);
    for (int i = 0; i < n_; ++i) in_basis_[m_ + i] = i;
  }

  LpStatus run(bool phase_one) {
    int degenerate_run = 0;
    const double cost_scale = phase_one ? 1.0 : std::max(1.0, g_.cwiseAbs().maxCoeff());
    while (true) {
      if (iterations_++ >= opt_.max_iterations) return LpStatus::iteration_limit;
      factor();
      const Eigen::VectorXd xb = lu_.solve(r_);
      Eigen::VectorXd cb(n_);
      for (int i = 0; i < n_; ++i) cb[i] = cost(basis_[i], phase_one);
      pi_ = lu_.transpose().solve(cb);

      const bool bland = degenerate_run >= opt_.degenerate_switch;
      int enter = -1;
      double best = -opt_.optimality_tol * cost_scale;
      // Artificial columns never re-enter.
      const Eigen::VectorXd reduced = g_phase(phase_one) - G_.transpose() * pi_;
      for (int j = 0; j < m_; ++j) {
        if (in_basis_[j] >= 0) continue;
        if (reduced[j] < best) {
          enter = j;
          if (bland) break;
          best = reduced[j];
        }
      }
      if (enter < 0) return LpStatus::optimal;

      const Eigen::VectorXd u = lu_.solve(G_.col(enter));
      int leave = -1;
      double theta = std::numeric_limits<double>::infinity();
      for (int i = 0; i < n_; ++i) {
        const bool artificial = basis_[i] >= m_;
        if (artificial && !phase_one && std::abs(u[i]) > opt_.pivot_tol) {
          // Artificial stuck at zero level: it must leave before it can move.
          if (theta > 0.0 || leave < 0) {
            theta = 0.0;
            leave = i;
          }
          continue;
        }
        if (u[i] > opt_.pivot_tol) {
          const double ratio = std::max(0.0, xb[i]) / u[i];
          if (ratio < theta || (ratio == theta && bland && basis_[i] < basis_[leave])) {
            theta = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) return LpStatus::unbounded;
      degenerate_run = theta <= 1e-14 ? degenerate_run + 1 : 0;
      in_basis_[basis_[leave]] = -1;
      basis_[leave] = enter;
      in_basis_[enter] = leave;
    }
  }

  double phase_one_objective() {
    factor();
    const Eigen::VectorXd xb = lu_.solve(r_);
    double acc = 0.0;
    for (int i = 0; i < n_; ++i) {
      if (basis_[i] >= m_) acc += std::max(0.0, xb[i]);
    }
    return acc;
  }

  const Eigen::VectorXd& multipliers() const { return pi_; }
  int iterations() const { return iterations_; }

 private:
  double cost(int j, bool phase_one) const {
    if (j >= m_) return phase_one ? 1.0 : 0.0;
    return phase_one ? 0.0 : g_[j];
  }

  Eigen::VectorXd g_phase(bool phase_one) const {
    if (phase_one) return Eigen::VectorXd::Zero(m_);
    return g_;
  }

  void factor() {
    Eigen::MatrixXd B(n_, n_);
    for (int i = 0; i < n_; ++i) {
      if (basis_[i] < m_) {
        B.col(i) = G_.col(basis_[i]);
      } else {
        B.col(i) = Eigen::VectorXd::Unit(n_, basis_[i] - m_);
      }
    }
    lu_.compute(B);
  }

  const Eigen::MatrixXd& G_;
  const Eigen::VectorXd& g_;
  const Eigen::VectorXd& r_;
  LpOptions opt_;
  int n_;
  int m_;
  std::vector<int> basis_;
  std::vector<int> in_basis_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  Eigen::VectorXd pi_;
  int iterations_ = 0;
};

}  // namespace

LpResult solve_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                  const LpOptions& options) {
  const Eigen::Index n = A.cols();
  const Eigen::Index m = A.rows();
  if (c.size() != n || b.size() != m) throw std::invalid_argument("solve_lp: dimension mismatch");
  if (n == 0) throw std::invalid_argument("solve_lp: no variables");

  // Normalize each constraint row; this leaves the feasible set unchanged.
  Eigen::MatrixXd G(n, m);
  Eigen::VectorXd g(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const double scale = A.row(j).cwiseAbs().maxCoeff();
    if (scale == 0.0) {
      if (b[j] < 0.0) return {LpStatus::infeasible, Eigen::VectorXd::Zero(n), 0.0, 0};
      G.col(j).setZero();
      g[j] = std::numeric_limits<double>::infinity();
      continue;
    }
    G.col(j) = A.row(j).transpose() / scale;
    g[j] = b[j] / scale;
  }
  // Empty rows can never enter; give them a huge but finite cost.
  const double big = g.cwiseAbs().unaryExpr([](double v) { return std::isfinite(v) ? v : 0.0; }).maxCoeff();
  for (Eigen::Index j = 0; j < m; ++j) {
    if (!std::isfinite(g[j])) g[j] = 1e3 * (1.0 + big);
  }

  Eigen::VectorXd r = -c;
  Eigen::VectorXd sign = Eigen::VectorXd::Ones(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (r[i] < 0.0) {
      sign[i] = -1.0;
      r[i] = -r[i];
      G.row(i) *= -1.0;
    }
  }

  DualSimplex solver(G, g, r, options);
  LpResult result;
  LpStatus st = solver.run(true);
  if (st == LpStatus::iteration_limit) {
    result.status = st;
    result.iterations = solver.iterations();
    return result;
  }
  if (solver.phase_one_objective() > 1e-9 * (1.0 + r.cwiseAbs().sum())) {
    // Dual infeasible: the primal is unbounded (or infeasible).
    result.status = LpStatus::unbounded;
    result.iterations = solver.iterations();
    result.x = Eigen::VectorXd::Zero(n);
    return result;
  }
  st = solver.run(false);
  result.iterations = solver.iterations();
  if (st == LpStatus::unbounded) {
    result.status = LpStatus::infeasible;
    result.x = Eigen::VectorXd::Zero(n);
    return result;
  }
  result.status = st;
  result.x = solver.multipliers().cwiseProduct(sign);
  result.objective = c.dot(result.x);
  return result;
}

}  // namespace kinetic
