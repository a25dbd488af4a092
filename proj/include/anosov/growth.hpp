#pragma once

// Geometric growth of leaf arcs.  Iterates a fixed root arc and fits the
// late-stage slope of log length per stage; the early stages carry the
// transient of the root's arbitrary placement, the tail is the growth
// exponent of the foliation.

#include <vector>

#include "anosov/leaf.hpp"

namespace anosov {

struct GrowthOptions {
    double radius = 0.2;
    int stages = 8;
    int window = 4;  // trailing stages entering the slope fit
    GrowOptions grow;
    RefineOptions refine;
};

struct GrowthSeries {
    Tag tag = Tag::uu;
    TorusPoint base;
    double radius = 0.0;
    std::vector<double> length;      // stage 0..stages
    std::vector<double> log_length;
    double chi = 0.0;         // slope of log length over the trailing window
    double chi_stderr = 0.0;  // fit standard error of that slope
};

GrowthSeries geometric_growth(const AnosovMap& map, Tag tag, const TorusPoint& x,
                              const GrowthOptions& opt = {});

struct ChiEstimate {
    Tag tag = Tag::uu;
    std::vector<GrowthSeries> per_base;
    double sup = 0.0;
    double mean = 0.0;
};

// Growth over a family of base points; `sup` is the largest per-base
// slope, the quantity compared against entropy rates.
ChiEstimate chi_sup(const AnosovMap& map, Tag tag, const std::vector<TorusPoint>& bases,
                    const GrowthOptions& opt = {});

}  // namespace anosov
