#pragma once

// Galilean Lie group on R^{1+2d}, kinetic scaling and the homogeneous norm.

#include <array>
#include <cmath>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace kinetic {

inline constexpr int kMaxDim = 3;

using Vec = std::array<double, kMaxDim>;

/// Fractional order parameter s in (0,1); the operator has order 2s.
class ScalingExponent {
 public:
  explicit ScalingExponent(double s);

  double value() const noexcept { return s_; }
  double two_s() const noexcept { return 2.0 * s_; }

  /// When s = num/den exactly (den <= 64), degree comparisons are exact.
  std::optional<std::pair<long, long>> rational() const noexcept { return rational_; }

  friend bool operator==(const ScalingExponent& a, const ScalingExponent& b) noexcept {
    return a.s_ == b.s_;
  }

 private:
  double s_;
  std::optional<std::pair<long, long>> rational_;
};

/// Phase-space event z = (t, x, v) with x, v in R^d, 1 <= d <= 3.
struct Point {
  double t = 0.0;
  Vec x{};
  Vec v{};
  int d = 1;

  Point() = default;
  Point(double t_, double x_, double v_);  // d = 1
  Point(double t_, std::initializer_list<double> x_, std::initializer_list<double> v_);
  Point(double t_, std::span<const double> x_, std::span<const double> v_);

  static Point zero(int d);

  /// Flat record (t, x[0..d), v[0..d)).
  std::vector<double> flat() const;
  static Point from_flat(std::span<const double> record, int d);

  bool operator==(const Point& o) const noexcept;
};

void check_dim(int d);
void require_same_dim(const Point& a, const Point& b);

double norm(const Vec& a, int d) noexcept;
double dot(const Vec& a, const Vec& b, int d) noexcept;

/// (t1,x1,v1) o (t2,x2,v2) = (t1+t2, x1+x2+t2 v1, v1+v2).
Point compose(const Point& a, const Point& b);
Point inverse(const Point& z);

/// S_R(t,x,v) = (R^{2s} t, R^{1+2s} x, R v).
Point scale(double R, const Point& z, const ScalingExponent& s);

/// max(|t|^{1/2s}, |x|^{1/(1+2s)}, |v|).
double knorm(const Point& z, const ScalingExponent& s);

std::string to_string(const Point& z);

}  // namespace kinetic
