#pragma once

// Lyapunov exponents along the invariant splitting.  Per-tag Birkhoff
// averages of one-step leaf growth over an ensemble of seeded orbits,
// plus a full QR (Oseledets) cocycle estimate used as a cross-check.

#include <array>
#include <cstdint>
#include <functional>

#include "anosov/bundles.hpp"
#include "anosov/map.hpp"

namespace anosov {

// Draws the i-th initial condition for a given base seed; implementations
// must be pure in (seed, i) so ensembles are reproducible and order-free.
using PointSampler = std::function<TorusPoint(std::uint64_t seed, std::uint64_t index)>;

PointSampler uniform_volume_sampler();

struct LyapunovEstimate {
    Tag tag = Tag::uu;
    double value = 0.0;
    double std_error = 0.0;
    int n = 0;
    int ensemble = 0;
    std::uint64_t seed = 0;
};

// Exponent of the tag's bundle along forward orbits (backward for s, so
// the s value is negative).  uu tracks the pushed bundle direction, wu
// uses the second diagonal of a 2-frame QR cocycle inside the unstable
// plane, s tracks the pulled direction under the inverse and flips sign.
LyapunovEstimate lyapunov_exponent(const AnosovMap& map, Tag tag, const PointSampler& sampler,
                                   int n, int ensemble, std::uint64_t seed, int threads = 1);

struct OseledetsEstimate {
    std::array<double, 3> exponents{};  // sorted descending
    double det_defect = 0.0;  // | sum log r_ii - sum log |det Df| | over the orbit
    int n = 0;
};

OseledetsEstimate oseledets_qr(const AnosovMap& map, const TorusPoint& x, int n);

}  // namespace anosov
