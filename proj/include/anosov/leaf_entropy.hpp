#pragma once

// Leaf-wise entropy from separated and spanning counts.
//
// A root arc is iterated through its expanding view; every stage keeps
// its monotone parameter-to-arclength table.  The stage-n orbit distance
// between two root parameters is the largest arclength gap their images
// show at any stage up to n, so counting eps-separated points and
// eps-covering balls reduces to threshold stepping through the tables.
// The entropy of the foliation through the base point is the late-stage
// slope of log(count) per stage, reported at the smallest scale.

#include <cstddef>
#include <vector>

#include "anosov/growth.hpp"
#include "anosov/leaf.hpp"

namespace anosov {

struct IteratedLeafCache {
    Tag tag = Tag::uu;
    TorusPoint base;
    double radius = 0.0;
    int stages = 0;

    // Per stage 0..stages, parallel monotone tables.
    std::vector<std::vector<double>> param;
    std::vector<std::vector<double>> cumlen;
    std::vector<double> length;

    double left() const { return param.front().front(); }
    double right() const { return param.front().back(); }

    // Arclength of root parameter t at stage k, and its inverse.
    double s(int k, double t) const;
    double t_of_s(int k, double v) const;

    // Orbit distance through stage n (the leaf-wise Bowen metric).
    double dn(int n, double a, double b) const;
};

IteratedLeafCache iterate_leaf_cache(const AnosovMap& map, Tag tag, const TorusPoint& x,
                                     double radius, int stages, const GrowOptions& grow = {},
                                     const RefineOptions& refine = {},
                                     std::size_t total_vertex_budget = 20000000);

// Size of a maximal subset of the root interval with pairwise orbit
// distance >= eps, by exact threshold stepping (greedy from the left is
// maximal because the metric is monotone along the leaf).
long long max_separated(const IteratedLeafCache& cache, int n, double eps);

// Minimal number of orbit-distance balls of radius eps covering the root
// interval, by the same stepping run twice per ball.
long long min_generator(const IteratedLeafCache& cache, int n, double eps);

// Restrictions of the two counts to a finite parameter grid, with the
// strict comparisons the exhaustive test oracles use.
long long max_separated_grid(const IteratedLeafCache& cache, int n, double eps,
                             const std::vector<double>& ts);
long long min_generator_grid(const IteratedLeafCache& cache, int n, double eps,
                             const std::vector<double>& ts);

struct LeafEntropyOptions {
    double radius = 0.1;
    std::vector<double> eps{0.05, 0.025, 0.0125};
    int n_min = 2;
    int n_max = 7;
    int window = 4;  // trailing stages in the slope fit
    GrowOptions grow;
    RefineOptions refine;
    std::size_t total_vertex_budget = 20000000;
};

struct LeafEntropyEstimate {
    Tag tag = Tag::uu;
    TorusPoint base;
    double radius = 0.0;
    std::vector<double> eps;
    std::vector<std::vector<long long>> count;  // [eps index][n - n_min]
    std::vector<double> rate;                   // slope of log count per eps
    std::vector<double> rate_stderr;
    double value = 0.0;  // rate at the smallest eps
    int n_min = 0, n_max = 0;
};

LeafEntropyEstimate leaf_entropy(const AnosovMap& map, Tag tag, const TorusPoint& x,
                                 const LeafEntropyOptions& opt = {});

struct GapOptions {
    GrowthOptions growth;
    LeafEntropyOptions entropy;
};

struct GrowthGap {
    GrowthSeries growth;
    LeafEntropyEstimate entropy;
    double chi = 0.0;
    double rate = 0.0;
    double gap = 0.0;  // chi - rate; zero for maps conjugate to their linear part
};

// Growth and entropy of the same foliation through the same base point;
// the counting bound  N(n, eps) <= (n+1) L_n / eps + 1  is asserted on
// every computed count as an internal consistency audit.
GrowthGap entropy_growth_gap(const AnosovMap& map, Tag tag, const TorusPoint& x,
                             const GapOptions& opt = {});

}  // namespace anosov
