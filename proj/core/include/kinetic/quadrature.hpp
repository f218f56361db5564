#pragma once

// Gauss-Legendre rules, sphere rules and the radial integration helpers shared by the
// kernel and operator code.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace kinetic {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule; computed once per n and cached.
const GaussRule& gauss_legendre(int n);

/// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + comp_; }
  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Directions on S^{d-1} with weights summing to the sphere area. Every rule is closed under
/// theta -> -theta; antipode[i] is the index of -theta_i.
struct SphereRule {
  int d = 1;
  std::vector<std::vector<double>> directions;
  std::vector<double> weights;
  std::vector<std::size_t> antipode;

  std::size_t size() const noexcept { return directions.size(); }
  double area() const noexcept;
};

/// d = 1: {+1, -1}; d = 2: 64 equally spaced angles; d = 3: 8 Gauss polar nodes x 16 azimuths.
const SphereRule& sphere_rule(int d);

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // |high-order - low-order| summed over panels
};

/// Integral of g over [lo, hi], 0 < lo < hi < inf. The interval is cut at powers of two and at
/// the given breakpoints; each piece is split into panels of at most one period of `frequency`.
/// Each panel uses Gauss-Legendre with 32 nodes, and 20 nodes for the error estimate.
QuadResult radial_quadrature(const std::function<double(double)>& g, double lo, double hi,
                             std::span<const double> breakpoints = {}, double frequency = 0.0);

/// Integral over [R, inf) of cos(kappa r) r^{-p} (cosine = true) or sin(kappa r) r^{-p}.
/// Requires p > 1 when kappa = 0 and p > 0 otherwise. Uses quadrature up to kappa r = 64 and the
/// asymptotic expansion beyond.
double power_oscillatory_tail(double p, double kappa, double R, bool cosine);

/// Integral over [0, r0] of (1 - cos(omega r)) r^{-1-2s}, by its power series (omega r0 small).
double one_minus_cos_head(double omega, double r0, double two_s);

}  // namespace kinetic
