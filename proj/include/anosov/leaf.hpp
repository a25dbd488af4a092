#pragma once

// Leaf arcs as refinable polylines.
//
// A segment is grown once through a base point by integrating the unit
// leaf field, then iterated one map step at a time in the view under
// which its foliation expands (forward for uu/wu, backward for s).  Each
// vertex keeps the parameter of its preimage on the root arc, so a
// family of iterates is a family of monotone parameter-to-arclength
// tables over one shared root interval.  Iteration refines edges by
// parameter bisection against a chord-sag test; new root parameters are
// positioned by interpolating the previous stage, whose own sag bound
// makes that interpolation safe.

#include <cstddef>
#include <vector>

#include "anosov/bundles.hpp"
#include "anosov/map.hpp"

namespace anosov {

struct LeafPoint {
    double param = 0.0;  // root parameter
    Vec3 lift;
};

struct LeafSegment {
    Tag tag = Tag::uu;
    bool backward = false;  // view used by iterate_leaf
    int stage = 0;
    TorusPoint base;

    // Parallel arrays; param is strictly increasing, cumlen starts at 0.
    std::vector<double> param;
    std::vector<Vec3> vertex;
    std::vector<double> cumlen;

    std::size_t size() const { return vertex.size(); }
    double length() const { return cumlen.empty() ? 0.0 : cumlen.back(); }

    Vec3 at_param(double t) const;
    LeafPoint at_arclength(double s) const;  // s in [0, length()]
    double arclength_of_param(double t) const;
    double param_of_arclength(double s) const;
};

struct GrowOptions {
    double step = 1e-3;              // RK4 arclength step
    double orientation_floor = 0.2;  // min cosine between consecutive field reads
    BundleOptions field;
};

// Leaf arc of the tag's foliation through x, arclength `radius` on both
// sides, parameterized by signed arclength in [-radius, radius].
LeafSegment grow_leaf(const AnosovMap& map, Tag tag, const TorusPoint& x, double radius,
                      const GrowOptions& opt = {});

struct RefineOptions {
    double max_sag = 1e-9;    // absolute midpoint-to-chord deviation
    double sag_ratio = 2e-4;  // and relative to the chord length
    double max_chord = 0.05;
    int max_depth = 30;
    std::size_t vertex_budget = 20000000;  // per call
};

// One step of the segment's expanding view, with refinement.  Existing
// vertices map through exactly; edges are bisected in the root parameter
// until the midpoint sag and the chord length pass the thresholds.
LeafSegment iterate_leaf(const AnosovMap& map, const LeafSegment& seg,
                         const RefineOptions& opt = {});

}  // namespace anosov
