#include "kinetic/distance.hpp"

#include <algorithm>
#include <cmath>

#include "kinetic/error.hpp"

namespace kinetic {

std::string_view to_string(DistanceKind kind) noexcept {
  switch (kind) {
    case DistanceKind::left: return "left";
    case DistanceKind::right: return "right";
    case DistanceKind::scaling: return "scaling";
    case DistanceKind::euclid: return "euclid";
  }
  return "unknown";
}

std::optional<DistanceKind> parse_distance_kind(std::string_view name) noexcept {
  if (name == "left") return DistanceKind::left;
  if (name == "right") return DistanceKind::right;
  if (name == "scaling") return DistanceKind::scaling;
  if (name == "euclid") return DistanceKind::euclid;
  return std::nullopt;
}

namespace {

Vec sub(const Vec& a, const Vec& b, int d) {
  Vec r{};
  for (int i = 0; i < d; ++i) r[i] = a[i] - b[i];
  return r;
}

double dist_vec(const Vec& a, const Vec& b, int d) { return norm(sub(a, b, d), d); }

// Closest point of the lens B(v1,r) n B(v2,r) to c. The lens is nonempty by precondition.
Vec project_onto_lens(const Vec& c, const Vec& v1, const Vec& v2, double r, int d) {
  if (d == 1) {
    const double lo = std::max(v1[0], v2[0]) - r;
    const double hi = std::min(v1[0], v2[0]) + r;
    Vec q{};
    q[0] = std::clamp(c[0], lo, hi);
    return q;
  }
  const double slack = 1e-14 * (1.0 + r);
  const double d1 = dist_vec(c, v1, d);
  const double d2 = dist_vec(c, v2, d);
  if (d1 <= r && d2 <= r) return c;

  Vec best{};
  double best_dist = INFINITY;
  auto consider = [&](const Vec& q) {
    if (dist_vec(q, v1, d) <= r + slack && dist_vec(q, v2, d) <= r + slack) {
      const double dq = dist_vec(q, c, d);
      if (dq < best_dist) {
        best_dist = dq;
        best = q;
      }
    }
  };
  auto ball_projection = [&](const Vec& center, double dc) {
    Vec q{};
    for (int i = 0; i < d; ++i) q[i] = center[i] + r * (c[i] - center[i]) / dc;
    return q;
  };
  if (d1 > r) consider(ball_projection(v1, d1));
  if (d2 > r) consider(ball_projection(v2, d2));

  // Rim of the lens: sphere of radius sqrt(r^2-h^2) around the midpoint, orthogonal to v2-v1.
  Vec m{};
  for (int i = 0; i < d; ++i) m[i] = 0.5 * (v1[i] + v2[i]);
  const Vec axis = sub(v2, v1, d);
  const double axis_len = norm(axis, d);
  const double h = 0.5 * axis_len;
  const double rim = std::sqrt(std::max(0.0, r * r - h * h));
  Vec rel = sub(c, m, d);
  if (axis_len > 0.0) {
    const double along = dot(rel, axis, d) / (axis_len * axis_len);
    for (int i = 0; i < d; ++i) rel[i] -= along * axis[i];
  }
  double rel_len = norm(rel, d);
  if (rel_len == 0.0) {
    // c lies on the axis: every rim point is equidistant; pick any orthogonal direction.
    Vec e{};
    int k = 0;
    for (int i = 1; i < d; ++i) {
      if (std::abs(axis[i]) < std::abs(axis[k])) k = i;
    }
    e[k] = 1.0;
    if (axis_len > 0.0) {
      const double along = dot(e, axis, d) / (axis_len * axis_len);
      for (int i = 0; i < d; ++i) e[i] -= along * axis[i];
    }
    rel = e;
    rel_len = norm(rel, d);
  }
  Vec q{};
  for (int i = 0; i < d; ++i) q[i] = m[i] + rim * rel[i] / rel_len;
  consider(q);
  return best;
}

}  // namespace

bool left_distance_feasible(const Point& z1, const Point& z2, const ScalingExponent& s, double r) {
  require_same_dim(z1, z2);
  if (r < 0.0) return false;
  const int d = z1.d;
  const double tbar = z1.t - z2.t;
  if (std::pow(std::abs(tbar), 1.0 / s.two_s()) > r) return false;
  if (dist_vec(z1.v, z2.v, d) > 2.0 * r) return false;
  const double xr = std::pow(r, 1.0 + s.two_s());
  const Vec xbar = sub(z1.x, z2.x, d);
  if (tbar == 0.0) return norm(xbar, d) <= xr;

  // Third ball has center xbar/tbar; compare |xbar - tbar q| directly at its lens projection q.
  Vec c{};
  for (int i = 0; i < d; ++i) c[i] = xbar[i] / tbar;
  const Vec q = project_onto_lens(c, z1.v, z2.v, r, d);
  Vec resid{};
  for (int i = 0; i < d; ++i) resid[i] = xbar[i] - tbar * q[i];
  return norm(resid, d) <= xr;
}

double left_distance(const Point& z1, const Point& z2, const ScalingExponent& s, double tol) {
  require_same_dim(z1, z2);
  if (!(tol > 0.0)) throw std::invalid_argument("distance tolerance must be positive");
  const double upper = knorm(compose(inverse(z2), z1), s);
  if (upper == 0.0) return 0.0;

  double lo = std::max(std::pow(std::abs(z1.t - z2.t), 1.0 / s.two_s()),
                       0.5 * dist_vec(z1.v, z2.v, z1.d));
  if (left_distance_feasible(z1, z2, s, lo)) return lo;
  double hi = kBracketSafety * upper;
  int iter = 0;
  while (!left_distance_feasible(z1, z2, s, hi)) {
    lo = hi;
    hi *= 2.0;
    if (++iter > kBisectionCap) throw ConvergenceError("left distance: no feasible upper bracket");
  }
  while (hi - lo > tol) {
    if (++iter > kBisectionCap) {
      throw ConvergenceError("left distance: bisection did not reach tol " + std::to_string(tol) +
                             " (coordinates too large for this tolerance)");
    }
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) {
      throw ConvergenceError("left distance: tolerance below floating resolution");
    }
    if (left_distance_feasible(z1, z2, s, mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double right_distance(const Point& z1, const Point& z2, const ScalingExponent& s, double tol) {
  require_same_dim(z1, z2);
  if (!(tol > 0.0)) throw std::invalid_argument("distance tolerance must be positive");
  const int d = z1.d;
  const double ts = s.two_s();
  const Vec xbar = sub(z1.x, z2.x, d);
  const Vec vbar = sub(z1.v, z2.v, d);
  const double vterm = std::pow(norm(vbar, d), ts);
  const double xpow = ts / (1.0 + ts);

  auto objective = [&](double h) {
    Vec y{};
    for (int i = 0; i < d; ++i) y[i] = xbar[i] + h * vbar[i];
    return std::max({std::abs(z2.t - h) + std::abs(h - z1.t), std::pow(norm(y, d), xpow), vterm});
  };

  const double tmin = std::min(z1.t, z2.t);
  const double tmax = std::max(z1.t, z2.t);
  const double vv = dot(vbar, vbar, d);
  double h0 = tmin;
  if (vv > 0.0) h0 = std::clamp(-dot(xbar, vbar, d) / vv, tmin, tmax);
  double best = objective(h0);

  // Any minimizer has |t2-h|+|h-t1| <= best, which brackets h.
  double a = 0.5 * (z1.t + z2.t - best);
  double b = 0.5 * (z1.t + z2.t + best);
  const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - invphi * (b - a);
  double e = a + invphi * (b - a);
  double fc = objective(c);
  double fe = objective(e);
  int iter = 0;
  while (b - a > tol && iter++ < kBisectionCap) {
    if (fc <= fe) {
      b = e;
      e = c;
      fe = fc;
      c = b - invphi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = e;
      fc = fe;
      e = a + invphi * (b - a);
      fe = objective(e);
    }
  }
  best = std::min({best, fc, fe, objective(0.5 * (a + b))});
  return std::pow(best, 1.0 / ts);
}

double scaling_distance(const Point& z1, const Point& z2, const ScalingExponent& s) {
  require_same_dim(z1, z2);
  Point diff = Point::zero(z1.d);
  diff.t = z1.t - z2.t;
  diff.x = sub(z1.x, z2.x, z1.d);
  diff.v = sub(z1.v, z2.v, z1.d);
  return knorm(diff, s);
}

double euclid_distance(const Point& z1, const Point& z2) {
  require_same_dim(z1, z2);
  const int d = z1.d;
  const double dt = z1.t - z2.t;
  const double dx = dist_vec(z1.x, z2.x, d);
  const double dv = dist_vec(z1.v, z2.v, d);
  return std::sqrt(dt * dt + dx * dx + dv * dv);
}

double dist(DistanceKind kind, const Point& z1, const Point& z2, const ScalingExponent& s,
            double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("distance tolerance must be positive");
  switch (kind) {
    case DistanceKind::left: return left_distance(z1, z2, s, tol);
    case DistanceKind::right: return right_distance(z1, z2, s, tol);
    case DistanceKind::scaling: return scaling_distance(z1, z2, s);
    case DistanceKind::euclid: return euclid_distance(z1, z2);
  }
  throw std::invalid_argument("unknown distance kind");
}

Cylinder::Cylinder(Point center_, double radius_, ScalingExponent s_)
    : center(center_), radius(radius_), s(s_) {
  if (!(radius > 0.0)) throw std::invalid_argument("cylinder radius must be positive");
}

bool cylinder_contains(const Cylinder& q, const Point& z, double tol) {
  require_same_dim(q.center, z);
  if (z.t > q.center.t) return false;
  return left_distance(q.center, z, q.s, tol) < q.radius - tol;
}

double boundary_distance(const Cylinder& q, const Point& z, double tol) {
  if (!cylinder_contains(q, z, tol)) {
    throw std::invalid_argument("boundary_distance: point " + to_string(z) +
                                " is outside the cylinder");
  }
  return q.radius - left_distance(q.center, z, q.s, tol);
}

}  // namespace kinetic
