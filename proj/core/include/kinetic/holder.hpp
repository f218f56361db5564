#pragma once

// Kinetic Hölder seminorm estimation by weighted minimax polynomial fitting.
//
// At a base point z0 the expansion p is fitted in the translated variable xi,
// z = z0 o xi, over the monomials of kinetic degree < alpha, minimizing
//   max_k |f(z_k) - p(xi_k)| / d(z0, z_k)^alpha.
// The optimum is a small linear program. A sample coinciding with z0 is not
// part of the ratio; it enters as the constraint p(0) = f(z0).

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kinetic/distance.hpp"
#include "kinetic/polynomial.hpp"
#include "kinetic/sampled_field.hpp"

namespace kinetic {

enum class WeightMetric {
  left,  // d_l(z0, z)
  norm   // ||z0^{-1} o z||
};

struct FitOptions {
  WeightMetric metric = WeightMetric::left;
  /// Overrides the basis threshold (default: alpha). Lets callers fit with a basis that is
  /// deliberately too small or too large for alpha.
  std::optional<double> basis_threshold;
  double distance_tol = kDefaultDistanceTol;
  /// Second-stage LP selecting the least l1 coefficient vector among minimax optima.
  bool tie_break = true;
};

struct FitResult {
  KineticPolynomial expansion;  // in the translated variable xi
  double residual = 0.0;
  Point witness;  // sample realizing the residual
  std::size_t samples_used = 0;
};

FitResult fit_expansion(const SampledField& f, const Point& z0, double alpha, const ScalingExponent& s,
                        const FitOptions& options = {});

struct HolderReport {
  double alpha = 0.0;
  double seminorm = 0.0;
  Point witness_base;
  Point witness_point;
  std::vector<std::pair<Point, KineticPolynomial>> expansions;
  std::size_t bases_used = 0;
  std::size_t bases_skipped = 0;

  std::string to_json() const;
};

/// Every k-th sample, with k chosen so that at most max_points remain.
std::vector<Point> default_base_points(const SampledField& f, std::size_t max_points = 200);

/// sup over base points of the fit residual: a lower bound for the seminorm on the sample hull.
HolderReport seminorm(const SampledField& f, const std::vector<Point>& bases, double alpha,
                      const ScalingExponent& s, const FitOptions& options = {});

struct AdimensionalOptions {
  FitOptions fit;
  std::size_t max_bases = 200;
  /// Base points used for the local seminorm inside Q_{d_z}(z), nearest first (z itself included).
  std::size_t local_base_cap = 8;
};

/// sup over interior base points z of d_z^alpha [f]_{C^alpha(Q_{d_z}(z))}, with d_z the
/// boundary-distance surrogate. Bases whose local cylinder holds too few samples are skipped.
HolderReport adimensional_seminorm(const SampledField& f, const Cylinder& q, double alpha,
                                   const ScalingExponent& s, const AdimensionalOptions& options = {});

struct InterpolationReport {
  double theta = 0.0;
  double low = 0.0, mid = 0.0, high = 0.0;  // estimated seminorms at alpha1 < alpha2 < alpha3
  double rhs = 0.0;                          // low^theta high^(1-theta) + low
  double slack = 0.0;                        // rhs - mid
  bool holds = true;                         // mid <= 2 rhs (estimator tolerance)
};

inline constexpr double kInterpolationTolerance = 2.0;

InterpolationReport interpolation_check(const SampledField& f, const std::vector<Point>& bases,
                                        double alpha1, double alpha2, double alpha3,
                                        const ScalingExponent& s, const FitOptions& options = {});

}  // namespace kinetic
