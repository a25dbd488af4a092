#pragma once

// Pointwise invariant directions of the splitting E^uu + E^wu + E^s.
//
// The strong-unstable direction is the forward push of a generic seed
// along a backward orbit (error contracts like |a_wu/a_uu|^n).  The
// stable direction is the same construction for the inverse map (rate
// |a_s/a_wu|^n).  The weak-unstable direction is extracted in two
// stages: block power iteration identifies the unstable 2-plane along
// the orbit (rate |a_s/a_wu|^n), then a generic in-plane vector is
// pulled backward m steps inside the plane field, where the weak
// direction dominates (rate |a_wu/a_uu|^m).
//
// Pointwise accuracy of the strong-unstable field is rounding-limited to
// about 1e-8: backward orbits lose digits at rate |1/a_s| per step while
// the push forgets old error only at rate |a_wu/a_uu|, so no depth gets
// past the shadowing floor.  The other two fields lean on the slower
// backward rate or on exactly reproducible forward orbits and reach
// machine precision.

#include "anosov/map.hpp"

namespace anosov {

struct BundleSample {
    TorusPoint base;
    Tag tag = Tag::uu;
    Vec3 direction;                      // unit vector
    double equivariance_residual = 0.0;  // angle(Df e(x), e(f x)), lines
    int depth = 0;
};

struct BundleOptions {
    double tol = 1e-11;  // target alignment error from the rate bound
    int min_depth = 4;
    int max_depth = 220;
    int extra_depth = 8;  // safety margin on top of the rate estimate
};

// Depth at which rate^depth <= tol.
int depth_for_rate(double rate, const BundleOptions& opt);

BundleSample strong_unstable_direction(const AnosovMap& map, const TorusPoint& x, int n);
BundleSample stable_direction(const AnosovMap& map, const TorusPoint& x, int n);
// n bounds the plane stage, m the in-plane extraction stage.
BundleSample weak_unstable_direction(const AnosovMap& map, const TorusPoint& x, int n, int m);

// The unstable 2-plane at x as an orthonormal pair.
struct PlaneSample {
    TorusPoint base;
    Vec3 u1, u2;
    int depth = 0;
};
PlaneSample unstable_plane(const AnosovMap& map, const TorusPoint& x, int n);

// Unit leaf direction with automatically chosen depths.  Orientation is
// resolved to have positive inner product with the corresponding
// eigendirection of the linear part (the fields stay in narrow cones
// around those axes on every certified map, so this is globally
// consistent).
Vec3 leaf_direction(const AnosovMap& map, Tag tag, const TorusPoint& x,
                    const BundleOptions& opt = {});

}  // namespace anosov
