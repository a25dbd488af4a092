#include "anosov/growth.hpp"

#include <cmath>

#include "anosov/errors.hpp"
#include "anosov/util.hpp"

namespace anosov {

GrowthSeries geometric_growth(const AnosovMap& map, Tag tag, const TorusPoint& x,
                              const GrowthOptions& opt) {
    if (opt.stages < 1) throw ConfigError("geometric_growth: stages must be positive");
    if (opt.window < 2 || opt.window > opt.stages)
        throw ConfigError("geometric_growth: window must lie in [2, stages]");

    GrowthSeries out;
    out.tag = tag;
    out.base = x;
    out.radius = opt.radius;

    LeafSegment seg = grow_leaf(map, tag, x, opt.radius, opt.grow);
    out.length.push_back(seg.length());
    for (int k = 0; k < opt.stages; ++k) {
        seg = iterate_leaf(map, seg, opt.refine);
        out.length.push_back(seg.length());
    }
    out.log_length.reserve(out.length.size());
    for (double l : out.length) out.log_length.push_back(std::log(l));

    std::vector<double> ks, ys;
    for (int k = opt.stages - opt.window; k <= opt.stages; ++k) {
        ks.push_back(double(k));
        ys.push_back(out.log_length[std::size_t(k)]);
    }
    LinearFit fit = linear_fit(ks, ys);
    out.chi = fit.slope;
    out.chi_stderr = fit.slope_stderr;
    return out;
}

ChiEstimate chi_sup(const AnosovMap& map, Tag tag, const std::vector<TorusPoint>& bases,
                    const GrowthOptions& opt) {
    if (bases.empty()) throw ConfigError("chi_sup: need at least one base point");
    ChiEstimate out;
    out.tag = tag;
    out.per_base.reserve(bases.size());
    KahanSum acc;
    out.sup = -1e300;
    for (const TorusPoint& x : bases) {
        out.per_base.push_back(geometric_growth(map, tag, x, opt));
        double chi = out.per_base.back().chi;
        acc.add(chi);
        if (chi > out.sup) out.sup = chi;
    }
    out.mean = acc.value() / double(bases.size());
    return out;
}

}  // namespace anosov
