#pragma once

// One-map experiment tying the pipeline together.  For each foliation it
// estimates the leaf-measure exponent lambda, the geometric growth chi,
// and the leaf-wise entropy, solves the conjugacy to the linear part,
// and probes the conjugacy's regularity along the leaves.  The verdict
// restates the rigidity dichotomy at estimator level: vanishing gaps
// should come with C1-consistent regularity everywhere, a resolved
// strict gap with a sub-Lipschitz verdict in its direction.

#include <array>
#include <cstdint>
#include <string>

#include "anosov/conjugacy.hpp"
#include "anosov/growth.hpp"
#include "anosov/leaf_entropy.hpp"
#include "anosov/measures.hpp"

namespace anosov {

struct RigidityOptions {
    std::uint64_t seed = 2026;
    int bases = 4;

    double measure_radius = 0.04;  // seed arc half-length for the leaf measure
    int measure_depth = 128;
    int measure_samples = 8192;

    // growth.stages is a ceiling; each tag is capped so the projected
    // final arc length (from the linear rates) stays under the length
    // budget.  The slow direction keeps the full stage count, the fast
    // ones stop before the refinement vertex budget is at risk.
    GrowthOptions growth;
    double growth_length_budget = 2000.0;
    LeafEntropyOptions entropy;

    int conj_grid = 16;
    double conj_tol = 1e-9;
    int verify_grid = 24;
    double foliation_radius = 0.1;

    RegularityOptions regularity;
    int regularity_bases = 3;

    // |chi - lambda| below this counts as "gap within tolerance"; a
    // strict gap additionally needs chi - lambda > 3 sigma.
    double gap_tolerance = 5e-3;

    RigidityOptions() {
        growth.stages = 12;
        growth.window = 5;
    }
};

struct RigidityTagReport {
    Tag tag = Tag::uu;
    double linear_log = 0.0;  // expansion log of the tag in its view
    SaghinXiaCheck sx;        // lambda, chi, slack = chi - lambda, sigma
    LeafEntropyEstimate entropy;
    double entropy_gap = 0.0;  // entropy value - chi mean
    RegularityReport regularity;
    bool gap_within_tolerance = false;
    bool strict_gap = false;
};

struct RigidityOutcome {
    std::array<RigidityTagReport, 3> tag;  // uu, wu, s
    ConjugacyMap conjugacy;
    SemiconjugacyCheck check;
    std::array<FoliationImageCheck, 3> foliation;
    bool hypothesis_satisfied = false;  // every gap within tolerance
    bool any_strict_gap = false;
    std::string verdict;  // "rigid-consistent" | "strict-gap" | "unresolved"
};

RigidityOutcome rigidity_experiment(const AnosovMap& map, const RigidityOptions& opt = {});

}  // namespace anosov
