#include "anosov/rigidity.hpp"

#include <algorithm>
#include <cmath>

#include "anosov/errors.hpp"
#include "anosov/lyapunov.hpp"
#include "anosov/util.hpp"

namespace anosov {

RigidityOutcome rigidity_experiment(const AnosovMap& map, const RigidityOptions& opt) {
    if (opt.bases < 1) throw ConfigError("rigidity_experiment: need at least one base point");
    if (opt.regularity_bases < 1 || opt.regularity_bases > opt.bases)
        throw ConfigError("rigidity_experiment: regularity_bases must lie in [1, bases]");

    PointSampler sampler = uniform_volume_sampler();
    std::vector<TorusPoint> bases;
    bases.reserve(std::size_t(opt.bases));
    for (int i = 0; i < opt.bases; ++i) bases.push_back(sampler(opt.seed, std::uint64_t(i)));
    std::vector<TorusPoint> reg_bases(bases.begin(), bases.begin() + opt.regularity_bases);

    RigidityOutcome out;
    out.conjugacy = solve_conjugacy(map, opt.conj_grid, opt.conj_tol);
    out.check = verify_semiconjugacy(map, out.conjugacy, opt.verify_grid);

    const Tag tags[3] = {Tag::uu, Tag::wu, Tag::s};
    for (int i = 0; i < 3; ++i) {
        Tag t = tags[i];
        RigidityTagReport& rep = out.tag[std::size_t(i)];
        rep.tag = t;
        double lg = map.spectrum().log_of(t);
        rep.linear_log = t == Tag::s ? -lg : lg;

        LeafSegment seed_arc = grow_leaf(map, t, bases.front(), opt.measure_radius);
        EmpiricalMeasure mu = ac_invariant_measure(map, t, seed_arc, opt.measure_depth,
                                                   opt.measure_samples,
                                                   derive_seed(opt.seed, 100 + std::uint64_t(i)));
        GrowthOptions growth = opt.growth;
        while (growth.stages > 4 &&
               2.0 * growth.radius * std::exp(double(growth.stages) * rep.linear_log) >
                   opt.growth_length_budget)
            --growth.stages;
        growth.window = std::max(2, std::min(opt.growth.window, growth.stages - 1));
        rep.sx = saghin_xia_check(map, t, mu, bases, growth);
        rep.entropy = leaf_entropy(map, t, bases.front(), opt.entropy);
        rep.entropy_gap = rep.entropy.value - rep.sx.chi.mean;
        rep.regularity = leafwise_regularity_probe(map, out.conjugacy, t, reg_bases, opt.regularity);
        out.foliation[std::size_t(i)] =
            foliation_image_check(map, out.conjugacy, t, bases.front(), opt.foliation_radius);

        rep.gap_within_tolerance = std::abs(rep.sx.slack) <= opt.gap_tolerance;
        rep.strict_gap = rep.sx.slack > 3.0 * rep.sx.sigma && rep.sx.slack > opt.gap_tolerance;
    }

    out.hypothesis_satisfied = true;
    for (const RigidityTagReport& rep : out.tag) {
        out.hypothesis_satisfied = out.hypothesis_satisfied && rep.gap_within_tolerance;
        out.any_strict_gap = out.any_strict_gap || rep.strict_gap;
    }
    bool any_sub = false;
    for (const RigidityTagReport& rep : out.tag)
        any_sub = any_sub || rep.regularity.verdict == RegularityVerdict::sub_lipschitz;

    if (out.any_strict_gap)
        out.verdict = "strict-gap";
    else if (out.hypothesis_satisfied && !any_sub)
        out.verdict = "rigid-consistent";
    else
        out.verdict = "unresolved";
    return out;
}

}  // namespace anosov
