#pragma once

// Kinetic distances and cylinders.
//
// The left-invariant distance d_l is a minimum over an auxiliary velocity w.
// It is evaluated by bisection on r over the feasibility predicate
//
//   |t1-t2|^{1/2s} <= r,  and  exists w with
//   |x1-x2-(t1-t2) w| <= r^{1+2s},  |v1-w| <= r,  |v2-w| <= r.
//
// The three constraints on w are Euclidean balls; their intersection is
// nonempty iff the third ball reaches the lens cut out by the first two,
// which is decided by projecting the third center onto that lens inside the
// plane spanned by the three centers. No division by (t1-t2) is needed.

#include <optional>
#include <string>
#include <string_view>

#include "kinetic/group.hpp"

namespace kinetic {

enum class DistanceKind { left, right, scaling, euclid };

std::string_view to_string(DistanceKind kind) noexcept;
std::optional<DistanceKind> parse_distance_kind(std::string_view name) noexcept;

inline constexpr double kDefaultDistanceTol = 1e-9;
inline constexpr int kBisectionCap = 200;
inline constexpr double kBracketSafety = 4.0;

/// The monotone predicate driving the bisection for d_l.
bool left_distance_feasible(const Point& z1, const Point& z2, const ScalingExponent& s, double r);

/// d_l(z1,z2) to absolute accuracy tol. Throws ConvergenceError if the cap is hit,
/// which happens when tol is below the floating resolution of the coordinates.
double left_distance(const Point& z1, const Point& z2, const ScalingExponent& s,
                     double tol = kDefaultDistanceTol);

/// Right-invariant distance; the infimum over the auxiliary time h uses golden-section search.
double right_distance(const Point& z1, const Point& z2, const ScalingExponent& s,
                      double tol = kDefaultDistanceTol);

/// ||z1 - z2|| with the homogeneous norm (no group structure).
double scaling_distance(const Point& z1, const Point& z2, const ScalingExponent& s);

double euclid_distance(const Point& z1, const Point& z2);

double dist(DistanceKind kind, const Point& z1, const Point& z2, const ScalingExponent& s,
            double tol = kDefaultDistanceTol);

/// Q_r(z0) = { z : t <= t0, d_l(z0, z) < r }.
struct Cylinder {
  Point center;
  double radius;
  ScalingExponent s;

  Cylinder(Point center_, double radius_, ScalingExponent s_);
};

/// Membership is decided conservatively: d_l must be below r by more than tol.
bool cylinder_contains(const Cylinder& q, const Point& z, double tol = kDefaultDistanceTol);

/// Surrogate r - d_l(z0, z) for the distance to the parabolic boundary.
/// It is a lower bound for the true boundary distance when s >= 1/2.
double boundary_distance(const Cylinder& q, const Point& z, double tol = kDefaultDistanceTol);

}  // namespace kinetic
