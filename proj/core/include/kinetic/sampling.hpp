#pragma once

// Deterministic quasi-random point sets.

#include <vector>

#include "kinetic/group.hpp"

namespace kinetic {

/// k-th element (k >= 1) of the van der Corput sequence in the given prime base.
double radical_inverse(unsigned long k, unsigned base) noexcept;

/// Halton points in [0,1)^dim, dim <= 16.
std::vector<std::vector<double>> halton(int dim, int n, unsigned long skip = 1);

/// Points of the unit kinetic ball {|t| <= 1, |x| <= 1, |v| <= 1}. With include_extremes, the
/// corners of the t/x/v ranges along coordinate axes are prepended (they carry the extrema of
/// low-degree polynomials).
std::vector<Point> unit_ball_samples(int d, int n, bool include_extremes);

}  // namespace kinetic
