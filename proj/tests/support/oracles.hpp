#pragma once

// Test-side oracles.  Each one reaches a value the library also computes,
// but through an independent route (closed forms, finite differences,
// exhaustive search, dynamic programming), so agreement is evidence and
// not tautology.

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "anosov/geometry.hpp"

namespace oracles {

// Real roots of x^3 - t x^2 + m x - d via the trigonometric closed form;
// requires three distinct real roots.  Returned sorted by modulus,
// descending.
std::array<double, 3> cardano_roots(std::int64_t t, std::int64_t m, std::int64_t d);

// Central finite-difference Jacobian of a smooth R^3 -> R^3 function.
anosov::Mat3 fd_jacobian(const std::function<anosov::Vec3(const anosov::Vec3&)>& f,
                         const anosov::Vec3& x, double h = 1e-6);

// Solves f(x) = y by exhaustive coarse-to-fine box search centred at
// `center` with half-width `radius`.  Brute force: no derivative, no
// fixed-point structure, just repeated 9x9x9 refinement of the best cell.
anosov::Vec3 grid_search_inverse(const std::function<anosov::Vec3(const anosov::Vec3&)>& f,
                                 const anosov::Vec3& y, const anosov::Vec3& center,
                                 double radius, int rounds = 48);

// Largest subset of ordered points with all consecutive (hence, for a
// monotone leaf metric, all pairwise) distances strictly above eps.
// O(N^2) dynamic program over all admissible predecessor chains.
int dp_max_separated(const std::vector<std::vector<double>>& dist, double eps);

// Smallest number of balls  { y : dist(center, y) < eps }  with centers
// drawn from the point set that cover the whole set.  Interval dynamic
// program over the coverage ranges of every candidate center.
int dp_min_generator(const std::vector<std::vector<double>>& dist, double eps);

}  // namespace oracles
