#include "kinetic/group.hpp"

#include <sstream>

namespace kinetic {

ScalingExponent::ScalingExponent(double s) : s_(s) {
  if (!(s > 0.0 && s < 1.0)) {
    throw std::invalid_argument("scaling exponent s must lie in (0,1), got " + std::to_string(s));
  }
  for (long den = 1; den <= 64; ++den) {
    const double num = s * static_cast<double>(den);
    if (num == std::floor(num)) {
      rational_ = std::make_pair(static_cast<long>(num), den);
      break;
    }
  }
}

void check_dim(int d) {
  if (d < 1 || d > kMaxDim) {
    throw std::invalid_argument("dimension must be in [1," + std::to_string(kMaxDim) + "], got " +
                                std::to_string(d));
  }
}

void require_same_dim(const Point& a, const Point& b) {
  if (a.d != b.d) {
    throw std::invalid_argument("dimension mismatch: " + std::to_string(a.d) + " vs " +
                                std::to_string(b.d));
  }
}

namespace {

void check_finite(const Point& z) {
  bool ok = std::isfinite(z.t);
  for (int i = 0; i < z.d; ++i) ok = ok && std::isfinite(z.x[i]) && std::isfinite(z.v[i]);
  if (!ok) throw std::invalid_argument("point coordinates must be finite");
}

}  // namespace

Point::Point(double t_, double x_, double v_) : t(t_), d(1) {
  x[0] = x_;
  v[0] = v_;
  check_finite(*this);
}

Point::Point(double t_, std::initializer_list<double> x_, std::initializer_list<double> v_)
    : Point(t_, std::span<const double>(x_.begin(), x_.size()),
            std::span<const double>(v_.begin(), v_.size())) {}

Point::Point(double t_, std::span<const double> x_, std::span<const double> v_)
    : t(t_), d(static_cast<int>(x_.size())) {
  if (x_.size() != v_.size()) throw std::invalid_argument("x and v must have the same dimension");
  check_dim(d);
  for (int i = 0; i < d; ++i) {
    x[i] = x_[i];
    v[i] = v_[i];
  }
  check_finite(*this);
}

Point Point::zero(int d) {
  check_dim(d);
  Point z;
  z.d = d;
  return z;
}

std::vector<double> Point::flat() const {
  std::vector<double> out;
  out.reserve(1 + 2 * d);
  out.push_back(t);
  for (int i = 0; i < d; ++i) out.push_back(x[i]);
  for (int i = 0; i < d; ++i) out.push_back(v[i]);
  return out;
}

Point Point::from_flat(std::span<const double> record, int d) {
  check_dim(d);
  if (record.size() != static_cast<std::size_t>(1 + 2 * d)) {
    throw std::invalid_argument("flat point record must have 1+2d entries");
  }
  return Point(record[0], record.subspan(1, d), record.subspan(1 + d, d));
}

bool Point::operator==(const Point& o) const noexcept {
  if (d != o.d || t != o.t) return false;
  for (int i = 0; i < d; ++i) {
    if (x[i] != o.x[i] || v[i] != o.v[i]) return false;
  }
  return true;
}

double norm(const Vec& a, int d) noexcept { return std::sqrt(dot(a, a, d)); }

double dot(const Vec& a, const Vec& b, int d) noexcept {
  double acc = 0.0;
  for (int i = 0; i < d; ++i) acc += a[i] * b[i];
  return acc;
}

Point compose(const Point& a, const Point& b) {
  require_same_dim(a, b);
  Point r = Point::zero(a.d);
  r.t = a.t + b.t;
  for (int i = 0; i < a.d; ++i) {
    r.x[i] = a.x[i] + b.x[i] + b.t * a.v[i];
    r.v[i] = a.v[i] + b.v[i];
  }
  return r;
}

Point inverse(const Point& z) {
  Point r = Point::zero(z.d);
  r.t = -z.t;
  for (int i = 0; i < z.d; ++i) {
    r.x[i] = -z.x[i] + z.t * z.v[i];
    r.v[i] = -z.v[i];
  }
  return r;
}

Point scale(double R, const Point& z, const ScalingExponent& s) {
  if (!(R > 0.0)) throw std::invalid_argument("scaling factor R must be positive");
  const double rt = std::pow(R, s.two_s());
  const double rx = std::pow(R, 1.0 + s.two_s());
  Point r = Point::zero(z.d);
  r.t = rt * z.t;
  for (int i = 0; i < z.d; ++i) {
    r.x[i] = rx * z.x[i];
    r.v[i] = R * z.v[i];
  }
  return r;
}

double knorm(const Point& z, const ScalingExponent& s) {
  const double a = std::pow(std::abs(z.t), 1.0 / s.two_s());
  const double b = std::pow(norm(z.x, z.d), 1.0 / (1.0 + s.two_s()));
  const double c = norm(z.v, z.d);
  return std::max({a, b, c});
}

std::string to_string(const Point& z) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << z.t << "; x=[";
  for (int i = 0; i < z.d; ++i) os << (i ? "," : "") << z.x[i];
  os << "]; v=[";
  for (int i = 0; i < z.d; ++i) os << (i ? "," : "") << z.v[i];
  os << "])";
  return os.str();
}

}  // namespace kinetic
