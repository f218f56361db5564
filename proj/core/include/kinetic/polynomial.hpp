#pragma once

// Kinetic monomials and polynomials.
//
// A monomial t^{j_t} x^{j_x} v^{j_v} has kinetic degree
//   2s j_t + (1+2s)|j_x| + |j_v|,
// so that m(S_R z) = R^{deg} m(z).

#include <array>
#include <compare>
#include <map>
#include <string>
#include <vector>

#include "kinetic/group.hpp"

namespace kinetic {

struct MultiIndex {
  int jt = 0;
  std::array<int, kMaxDim> jx{};
  std::array<int, kMaxDim> jv{};
  int d = 1;

  MultiIndex() = default;
  MultiIndex(int jt_, std::array<int, kMaxDim> jx_, std::array<int, kMaxDim> jv_, int d_);

  static MultiIndex constant(int d);
  static MultiIndex t_power(int k, int d);
  static MultiIndex x_power(int i, int k, int d);
  static MultiIndex v_power(int i, int k, int d);

  /// |j_x| + |j_v|.
  int plain_order() const noexcept;
  /// j_t + |j_x|: the count multiplying 2s in the degree.
  int scaled_order() const noexcept;
  int v_order() const noexcept;
  int x_order() const noexcept;

  double eval(const Point& z) const;

  auto operator<=>(const MultiIndex&) const = default;
};

double kinetic_degree(const MultiIndex& j, const ScalingExponent& s) noexcept;

/// -1, 0, +1 as deg(j) is below, on, or above the threshold. Exact on the lattice N + 2sN
/// when s is rational with small denominator; relative tolerance 1e-12 otherwise.
int compare_degree(const MultiIndex& j, double threshold, const ScalingExponent& s);

/// All multi-indices of kinetic degree strictly below the threshold, sorted by degree then index.
std::vector<MultiIndex> monomial_basis(double threshold, const ScalingExponent& s, int d);

/// Same as monomial_basis but including degree equal to the threshold.
std::vector<MultiIndex> monomial_basis_upto(double degree, const ScalingExponent& s, int d);

std::string to_string(const MultiIndex& j);

class KineticPolynomial {
 public:
  KineticPolynomial(ScalingExponent s, int d);

  static KineticPolynomial constant(double c, ScalingExponent s, int d);
  static KineticPolynomial monomial(const MultiIndex& j, double c, ScalingExponent s);

  /// Adds c to the coefficient of j; entries that become exactly zero are removed.
  void add_term(const MultiIndex& j, double c);
  double coefficient(const MultiIndex& j) const;

  const std::map<MultiIndex, double>& terms() const noexcept { return terms_; }
  const ScalingExponent& s() const noexcept { return s_; }
  int d() const noexcept { return d_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  /// Max kinetic degree over stored terms; 0 for the zero polynomial.
  double degree() const;

  double eval(const Point& z) const;

  /// Drops coefficients with |a| <= eps * max|a|.
  void prune(double eps);

  KineticPolynomial operator+(const KineticPolynomial& o) const;
  KineticPolynomial operator-(const KineticPolynomial& o) const;
  KineticPolynomial operator*(const KineticPolynomial& o) const;
  KineticPolynomial operator*(double c) const;

  /// Partial derivatives as exact polynomial operations.
  KineticPolynomial dt() const;
  KineticPolynomial dx(int i) const;
  KineticPolynomial dv(int i) const;
  /// dt + v . grad_x
  KineticPolynomial transport() const;

 private:
  void check_compatible(const KineticPolynomial& o) const;

  ScalingExponent s_;
  int d_;
  std::map<MultiIndex, double> terms_;
};

/// q(z) = p(z0 o z), re-expanded in monomials of z.
KineticPolynomial left_translate(const KineticPolynomial& p, const Point& z0);

/// q(z) = p(S_R z): a_j -> a_j R^{deg_j}.
KineticPolynomial scale_poly(const KineticPolynomial& p, double R);

struct CoefficientBound {
  MultiIndex index;
  double coefficient;
  double bound;
  bool within;
};

struct CoefficientBoundReport {
  double equivalence_constant;  // C, includes the safety factor
  double sampled_sup;           // sup over the sampled ball of radius r
  std::vector<CoefficientBound> terms;
  bool all_within;
};

inline constexpr double kEquivalenceSafety = 2.0;

/// Norm-equivalence constant between max|a_j| and sup_{||z||<=1}|p| for polynomials of kinetic
/// degree <= degree, estimated once per (degree, s, d) and cached. Includes the safety factor.
double equivalence_constant(double degree, const ScalingExponent& s, int d);

/// Given sup_{||z||<=r}|p| <= C0 r^alpha, bounds each |a_j| by C C0 r^{alpha - deg_j}.
/// Throws std::invalid_argument if the sampled sup violates the hypothesis.
CoefficientBoundReport coeff_bound_from_sup(const KineticPolynomial& p, double r, double C0,
                                            double alpha);

/// JSON text: [{"jt":..,"jx":[..],"jv":[..],"c":..}, ...]
std::string to_json(const KineticPolynomial& p);
KineticPolynomial polynomial_from_json(const std::string& text, ScalingExponent s, int d);

}  // namespace kinetic
