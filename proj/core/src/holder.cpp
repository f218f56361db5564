#include "kinetic/holder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"
#include "kinetic/error.hpp"
#include "kinetic/parallel.hpp"
#include "kinetic/simplex.hpp"

namespace kinetic {

namespace {

constexpr double kCoincide = 1e-14;
constexpr double kBoxFactor = 1e6;

struct Prepared {
  std::vector<Eigen::VectorXd> rows;  // normalized basis values
  std::vector<double> weights;
  std::vector<double> values;
  std::vector<std::size_t> index;     // position in the field
  std::optional<Eigen::VectorXd> anchor_row;
  double anchor_value = 0.0;
};

Eigen::MatrixXd build_constraints(const Prepared& P, Eigen::Index nb, double box,
                                  Eigen::VectorXd& rhs, bool with_error_var, double error_bound) {
  const Eigen::Index np = static_cast<Eigen::Index>(P.rows.size());
  const Eigen::Index nvar = with_error_var ? nb + 1 : 2 * nb;
  const Eigen::Index nanchor = P.anchor_row ? 2 : 0;
  const Eigen::Index nbox = with_error_var ? 2 * nb + 1 : 4 * nb;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * np + nanchor + nbox, nvar);
  rhs.resize(A.rows());
  Eigen::Index r = 0;
  for (Eigen::Index k = 0; k < np; ++k) {
    const double w = P.weights[k];
    A.row(r).head(nb) = -w * P.rows[k].transpose();
    A.row(r + 1).head(nb) = w * P.rows[k].transpose();
    if (with_error_var) {
      A(r, nb) = -1.0;
      A(r + 1, nb) = -1.0;
      rhs[r] = -w * P.values[k];
      rhs[r + 1] = w * P.values[k];
    } else {
      rhs[r] = error_bound - w * P.values[k];
      rhs[r + 1] = error_bound + w * P.values[k];
    }
    r += 2;
  }
  if (P.anchor_row) {
    A.row(r).head(nb) = P.anchor_row->transpose();
    rhs[r] = P.anchor_value;
    A.row(r + 1).head(nb) = -P.anchor_row->transpose();
    rhs[r + 1] = -P.anchor_value;
    r += 2;
  }
  if (with_error_var) {
    for (Eigen::Index j = 0; j < nb; ++j) {
      A(r, j) = 1.0;
      rhs[r++] = box;
      A(r, j) = -1.0;
      rhs[r++] = box;
    }
    A(r, nb) = -1.0;
    rhs[r++] = 0.0;
  } else {
    // |a_j| <= u_j <= box
    for (Eigen::Index j = 0; j < nb; ++j) {
      A(r, j) = 1.0;
      A(r, nb + j) = -1.0;
      rhs[r++] = 0.0;
      A(r, j) = -1.0;
      A(r, nb + j) = -1.0;
      rhs[r++] = 0.0;
      A(r, nb + j) = 1.0;
      rhs[r++] = box;
      A(r, nb + j) = -1.0;
      rhs[r++] = 0.0;
    }
  }
  return A;
}

}  // namespace

FitResult fit_expansion(const SampledField& f, const Point& z0, double alpha, const ScalingExponent& s,
                        const FitOptions& options) {
  f.validate();
  if (!(alpha > 0.0)) throw std::invalid_argument("fit_expansion: alpha must be positive");
  if (z0.d != f.d) throw std::invalid_argument("fit_expansion: base point dimension differs");
  const double threshold = options.basis_threshold.value_or(alpha);
  const auto basis = monomial_basis(threshold, s, f.d);
  const Eigen::Index nb = static_cast<Eigen::Index>(basis.size());

  const Point z0inv = inverse(z0);
  std::vector<Point> xi(f.size());
  std::vector<double> dist(f.size());
  double rho = 0.0, fmax = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    xi[k] = compose(z0inv, f.points[k]);
    dist[k] = options.metric == WeightMetric::left
                  ? left_distance(z0, f.points[k], s, options.distance_tol)
                  : knorm(xi[k], s);
    rho = std::max(rho, knorm(xi[k], s));
    fmax = std::max(fmax, std::abs(f.values[k]));
  }
  if (rho == 0.0) rho = 1.0;

  // Basis functions are rescaled to the sample radius so coefficients stay O(max|f|).
  std::vector<double> colscale(nb);
  for (Eigen::Index j = 0; j < nb; ++j) colscale[j] = std::pow(rho, kinetic_degree(basis[j], s));
  auto row_of = [&](const Point& x) {
    Eigen::VectorXd r(nb);
    for (Eigen::Index j = 0; j < nb; ++j) r[j] = basis[j].eval(x) / colscale[j];
    return r;
  };

  Prepared P;
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (dist[k] <= kCoincide * (1.0 + rho)) {
      if (P.anchor_row) throw std::invalid_argument("fit_expansion: duplicate samples at the base point");
      P.anchor_row = row_of(xi[k]);
      P.anchor_value = f.values[k];
      continue;
    }
    P.rows.push_back(row_of(xi[k]));
    P.weights.push_back(std::pow(dist[k], -alpha));
    P.values.push_back(f.values[k]);
    P.index.push_back(k);
  }
  const std::size_t equations = P.rows.size() + (P.anchor_row ? 1 : 0);
  if (equations < static_cast<std::size_t>(nb)) {
    throw std::invalid_argument("fit_expansion: underdetermined (" + std::to_string(equations) +
                                " samples for a basis of " + std::to_string(nb) + ")");
  }
  if (P.rows.empty()) throw std::invalid_argument("fit_expansion: no samples away from the base point");

  const double box = kBoxFactor * (1.0 + fmax);
  Eigen::VectorXd rhs;
  Eigen::MatrixXd A = build_constraints(P, nb, box, rhs, true, 0.0);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(nb + 1);
  c[nb] = 1.0;
  LpResult res = solve_lp(c, A, rhs);
  if (res.status != LpStatus::optimal) {
    throw ConvergenceError(std::string("fit_expansion: LP ") + to_string(res.status));
  }
  Eigen::VectorXd coef = res.x.head(nb);

  if (options.tie_break && nb > 1) {
    const double emax = res.x[nb];
    const double bound = emax * (1.0 + 1e-9) + 1e-13 * (1.0 + fmax);
    Eigen::VectorXd rhs2;
    Eigen::MatrixXd A2 = build_constraints(P, nb, box, rhs2, false, bound);
    Eigen::VectorXd c2 = Eigen::VectorXd::Zero(2 * nb);
    c2.tail(nb).setOnes();
    const LpResult res2 = solve_lp(c2, A2, rhs2);
    if (res2.status == LpStatus::optimal) coef = res2.x.head(nb);
  }

  FitResult out{KineticPolynomial(s, f.d), 0.0, f.points[P.index[0]], P.rows.size()};
  for (Eigen::Index j = 0; j < nb; ++j) out.expansion.add_term(basis[j], coef[j] / colscale[j]);
  for (std::size_t k = 0; k < P.rows.size(); ++k) {
    const double r = P.weights[k] * std::abs(P.values[k] - P.rows[k].dot(coef));
    if (r > out.residual) {
      out.residual = r;
      out.witness = f.points[P.index[k]];
    }
  }
  return out;
}

std::string HolderReport::to_json() const {
  nlohmann::json j;
  j["alpha"] = alpha;
  j["seminorm"] = seminorm;
  j["witness"] = {{"base", witness_base.flat()}, {"point", witness_point.flat()}};
  j["bases_used"] = bases_used;
  j["bases_skipped"] = bases_skipped;
  nlohmann::json ex = nlohmann::json::array();
  for (const auto& [z, p] : expansions) {
    ex.push_back({{"base", z.flat()}, {"terms", nlohmann::json::parse(kinetic::to_json(p))}});
  }
  j["expansions"] = ex;
  return j.dump(2);
}

std::vector<Point> default_base_points(const SampledField& f, std::size_t max_points) {
  if (max_points == 0) throw std::invalid_argument("default_base_points: max_points must be positive");
  const std::size_t n = f.size();
  const std::size_t k = std::max<std::size_t>(1, (n + max_points - 1) / max_points);
  std::vector<Point> out;
  for (std::size_t i = 0; i < n; i += k) out.push_back(f.points[i]);
  return out;
}

namespace {

void check_in_hull(const SampledField& f, const Point& z) {
  std::vector<double> lo = f.points.at(0).flat(), hi = lo;
  for (const auto& p : f.points) {
    const auto r = p.flat();
    for (std::size_t i = 0; i < r.size(); ++i) {
      lo[i] = std::min(lo[i], r[i]);
      hi[i] = std::max(hi[i], r[i]);
    }
  }
  const auto r = z.flat();
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double tol = 1e-12 * (1.0 + std::abs(lo[i]) + std::abs(hi[i]));
    if (r[i] < lo[i] - tol || r[i] > hi[i] + tol) {
      throw std::invalid_argument("seminorm: base point " + to_string(z) + " outside the sample box");
    }
  }
}

HolderReport merge(double alpha, std::vector<std::optional<std::pair<Point, FitResult>>>& fits,
                   const std::vector<double>& factors) {
  HolderReport rep;
  rep.alpha = alpha;
  bool any = false;
  for (std::size_t i = 0; i < fits.size(); ++i) {
    if (!fits[i]) {
      ++rep.bases_skipped;
      continue;
    }
    ++rep.bases_used;
    auto& [base, fit] = *fits[i];
    const double value = factors.empty() ? fit.residual : factors[i] * fit.residual;
    if (!any || value > rep.seminorm) {
      rep.seminorm = value;
      rep.witness_base = base;
      rep.witness_point = fit.witness;
      any = true;
    }
    rep.expansions.emplace_back(base, std::move(fit.expansion));
  }
  return rep;
}

}  // namespace

HolderReport seminorm(const SampledField& f, const std::vector<Point>& bases, double alpha,
                      const ScalingExponent& s, const FitOptions& options) {
  if (bases.empty()) throw std::invalid_argument("seminorm: no base points");
  if (f.size() == 0) throw std::invalid_argument("seminorm: empty field");
  for (const auto& z : bases) check_in_hull(f, z);
  std::vector<std::optional<std::pair<Point, FitResult>>> fits(bases.size());
  parallel_for(bases.size(), [&](std::size_t i) {
    fits[i].emplace(bases[i], fit_expansion(f, bases[i], alpha, s, options));
  });
  return merge(alpha, fits, {});
}

HolderReport adimensional_seminorm(const SampledField& f, const Cylinder& q, double alpha,
                                   const ScalingExponent& s, const AdimensionalOptions& options) {
  const double tol = options.fit.distance_tol;
  const SampledField interior = f.filter([&](const Point& z) { return cylinder_contains(q, z, tol); });
  if (interior.size() == 0) throw std::invalid_argument("adimensional_seminorm: no samples inside the cylinder");
  const auto bases = default_base_points(interior, options.max_bases);
  const std::size_t nb = monomial_basis(options.fit.basis_threshold.value_or(alpha), s, f.d).size();

  std::vector<std::optional<std::pair<Point, FitResult>>> fits(bases.size());
  std::vector<double> factors(bases.size(), 0.0);
  parallel_for(bases.size(), [&](std::size_t i) {
    const Point& z = bases[i];
    const double dz = boundary_distance(q, z, tol);
    const Cylinder local(z, dz, s);
    const SampledField near = interior.filter([&](const Point& w) { return cylinder_contains(local, w, tol); });
    if (near.size() < nb + 1) return;
    // Local bases: z and its nearest neighbours among the global bases inside the local cylinder.
    std::vector<std::pair<double, Point>> cand;
    for (const auto& b : bases) {
      if (cylinder_contains(local, b, tol)) cand.emplace_back(left_distance(z, b, s, tol), b);
    }
    std::sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    if (cand.size() > options.local_base_cap) cand.resize(options.local_base_cap);
    std::optional<FitResult> best;
    for (const auto& [dist, b] : cand) {
      FitResult fit = fit_expansion(near, b, alpha, s, options.fit);
      if (!best || fit.residual > best->residual) best = std::move(fit);
    }
    if (!best) return;
    fits[i].emplace(z, std::move(*best));
    factors[i] = std::pow(dz, alpha);
  });
  HolderReport rep = merge(alpha, fits, factors);
  if (rep.bases_used == 0) {
    throw std::invalid_argument("adimensional_seminorm: no interior base point had enough local samples");
  }
  return rep;
}

InterpolationReport interpolation_check(const SampledField& f, const std::vector<Point>& bases,
                                        double alpha1, double alpha2, double alpha3,
                                        const ScalingExponent& s, const FitOptions& options) {
  if (!(alpha1 < alpha2 && alpha2 < alpha3)) {
    throw std::invalid_argument("interpolation_check: need alpha1 < alpha2 < alpha3");
  }
  InterpolationReport rep;
  rep.theta = (alpha3 - alpha2) / (alpha3 - alpha1);
  rep.low = seminorm(f, bases, alpha1, s, options).seminorm;
  rep.mid = seminorm(f, bases, alpha2, s, options).seminorm;
  rep.high = seminorm(f, bases, alpha3, s, options).seminorm;
  rep.rhs = std::pow(rep.low, rep.theta) * std::pow(rep.high, 1.0 - rep.theta) + rep.low;
  rep.slack = rep.rhs - rep.mid;
  rep.holds = rep.mid <= kInterpolationTolerance * rep.rhs + 1e-12;
  return rep;
}

}  // namespace kinetic
