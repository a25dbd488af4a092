#include "anosov/leaf_entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "anosov/errors.hpp"
#include "anosov/util.hpp"

namespace anosov {
namespace {

double table_lookup(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t hi = std::size_t(it - xs.begin());
    if (hi == 0) hi = 1;
    if (hi >= xs.size()) hi = xs.size() - 1;
    double w = (x - xs[hi - 1]) / (xs[hi] - xs[hi - 1]);
    return ys[hi - 1] + (ys[hi] - ys[hi - 1]) * w;
}

// Forward cursor over one stage table: evaluates y(x) for a
// nondecreasing stream of queries in amortized constant time.
struct Cursor {
    const std::vector<double>* xs = nullptr;
    const std::vector<double>* ys = nullptr;
    std::size_t i = 0;

    double eval(double x) {
        while (i + 2 < xs->size() && (*xs)[i + 1] < x) ++i;
        double w = (x - (*xs)[i]) / ((*xs)[i + 1] - (*xs)[i]);
        return (*ys)[i] + ((*ys)[i + 1] - (*ys)[i]) * w;
    }
};

// Threshold stepper: T(t) = min over stages k <= n of the parameter
// where stage k's arclength first exceeds s_k(t) + eps.  Returns +inf
// when no stage has that much arclength left.
struct Stepper {
    std::vector<Cursor> fwd;  // param -> cumlen
    std::vector<Cursor> inv;  // cumlen -> param
    const std::vector<double>* length = nullptr;

    Stepper(const IteratedLeafCache& cache, int n) {
        fwd.resize(std::size_t(n) + 1);
        inv.resize(std::size_t(n) + 1);
        for (int k = 0; k <= n; ++k) {
            fwd[std::size_t(k)] = {&cache.param[std::size_t(k)], &cache.cumlen[std::size_t(k)], 0};
            inv[std::size_t(k)] = {&cache.cumlen[std::size_t(k)], &cache.param[std::size_t(k)], 0};
        }
        length = &cache.length;
    }

    double step(double t, double eps) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < fwd.size(); ++k) {
            double target = fwd[k].eval(t) + eps;
            if (target > (*length)[k]) continue;
            best = std::min(best, inv[k].eval(target));
        }
        return best;
    }
};

}  // namespace

double IteratedLeafCache::s(int k, double t) const {
    return table_lookup(param[std::size_t(k)], cumlen[std::size_t(k)], t);
}

double IteratedLeafCache::t_of_s(int k, double v) const {
    return table_lookup(cumlen[std::size_t(k)], param[std::size_t(k)], v);
}

double IteratedLeafCache::dn(int n, double a, double b) const {
    double d = 0.0;
    for (int k = 0; k <= n; ++k) d = std::max(d, std::abs(s(k, b) - s(k, a)));
    return d;
}

IteratedLeafCache iterate_leaf_cache(const AnosovMap& map, Tag tag, const TorusPoint& x,
                                     double radius, int stages, const GrowOptions& grow,
                                     const RefineOptions& refine,
                                     std::size_t total_vertex_budget) {
    if (stages < 1) throw ConfigError("iterate_leaf_cache: stages must be positive");
    IteratedLeafCache cache;
    cache.tag = tag;
    cache.base = x;
    cache.radius = radius;
    cache.stages = stages;

    LeafSegment seg = grow_leaf(map, tag, x, radius, grow);
    std::size_t total = 0;
    auto keep = [&](const LeafSegment& s) {
        total += s.size();
        if (total > total_vertex_budget)
            throw VertexBudgetExceeded("iterate_leaf_cache: stage tables exceed " +
                                       std::to_string(total_vertex_budget) + " vertices");
        cache.param.push_back(s.param);
        cache.cumlen.push_back(s.cumlen);
        cache.length.push_back(s.length());
    };
    keep(seg);
    for (int k = 0; k < stages; ++k) {
        seg = iterate_leaf(map, seg, refine);
        keep(seg);
    }
    return cache;
}

long long max_separated(const IteratedLeafCache& cache, int n, double eps) {
    if (n < 0 || n > cache.stages) throw ConfigError("max_separated: stage out of range");
    if (!(eps > 0.0)) throw ConfigError("max_separated: eps must be positive");
    Stepper st(cache, n);
    const double hi = cache.right();
    double t = cache.left();
    long long count = 1;
    for (;;) {
        double next = st.step(t, eps);
        if (!(next <= hi) || !(next > t)) break;
        ++count;
        t = next;
    }
    return count;
}

long long min_generator(const IteratedLeafCache& cache, int n, double eps) {
    if (n < 0 || n > cache.stages) throw ConfigError("min_generator: stage out of range");
    if (!(eps > 0.0)) throw ConfigError("min_generator: eps must be positive");
    Stepper st(cache, n);
    const double hi = cache.right();
    double covered = cache.left();
    long long count = 0;
    while (covered < hi) {
        ++count;
        double center = st.step(covered, eps);  // farthest center still covering `covered`
        if (!(center <= hi)) break;             // one ball reaches the end
        double reach = st.step(center, eps);
        if (!(reach > covered)) break;  // edge of resolution; treat as covered
        covered = reach;
    }
    return std::max<long long>(count, 1);
}

long long max_separated_grid(const IteratedLeafCache& cache, int n, double eps,
                             const std::vector<double>& ts) {
    if (ts.empty()) return 0;
    long long count = 1;
    double sel = ts.front();
    for (double t : ts)
        if (cache.dn(n, sel, t) > eps) {
            ++count;
            sel = t;
        }
    return count;
}

long long min_generator_grid(const IteratedLeafCache& cache, int n, double eps,
                             const std::vector<double>& ts) {
    if (ts.empty()) return 0;
    long long count = 0;
    std::size_t uncovered = 0;
    while (uncovered < ts.size()) {
        // Rightmost admissible center for the first uncovered point.
        std::size_t center = uncovered;
        for (std::size_t j = uncovered; j < ts.size(); ++j)
            if (cache.dn(n, ts[uncovered], ts[j]) < eps) center = j;
        ++count;
        std::size_t next = ts.size();
        for (std::size_t j = uncovered; j < ts.size(); ++j)
            if (cache.dn(n, ts[center], ts[j]) >= eps) {
                next = j;
                break;
            }
        uncovered = next;
    }
    return count;
}

LeafEntropyEstimate leaf_entropy(const AnosovMap& map, Tag tag, const TorusPoint& x,
                                 const LeafEntropyOptions& opt) {
    if (opt.eps.empty()) throw ConfigError("leaf_entropy: need at least one scale");
    if (opt.n_min < 0 || opt.n_min >= opt.n_max)
        throw ConfigError("leaf_entropy: need 0 <= n_min < n_max");
    if (opt.window < 2 || opt.n_max - opt.window + 1 < opt.n_min)
        throw ConfigError("leaf_entropy: window does not fit the stage range");

    IteratedLeafCache cache = iterate_leaf_cache(map, tag, x, opt.radius, opt.n_max, opt.grow,
                                                 opt.refine, opt.total_vertex_budget);

    LeafEntropyEstimate out;
    out.tag = tag;
    out.base = x;
    out.radius = opt.radius;
    out.eps = opt.eps;
    std::sort(out.eps.rbegin(), out.eps.rend());
    out.n_min = opt.n_min;
    out.n_max = opt.n_max;

    for (double eps : out.eps) {
        std::vector<long long> row;
        for (int n = opt.n_min; n <= opt.n_max; ++n) row.push_back(max_separated(cache, n, eps));
        out.count.push_back(row);

        std::vector<double> ks, ys;
        for (int n = opt.n_max - opt.window + 1; n <= opt.n_max; ++n) {
            ks.push_back(double(n));
            ys.push_back(std::log(double(row[std::size_t(n - opt.n_min)])));
        }
        LinearFit fit = linear_fit(ks, ys);
        out.rate.push_back(fit.slope);
        out.rate_stderr.push_back(fit.slope_stderr);
    }
    out.value = out.rate.back();

    // Counting-bound audit: a separated set spends eps of some stage's
    // arclength between neighbours, so the count is capped by the table
    // lengths.  A violation means the stage tables are inconsistent.
    for (std::size_t e = 0; e < out.eps.size(); ++e)
        for (int n = opt.n_min; n <= opt.n_max; ++n) {
            double cap = double(n + 1) * cache.length[std::size_t(n)] / out.eps[e] + 1.0;
            if (double(out.count[e][std::size_t(n - opt.n_min)]) > cap)
                throw Error("leaf_entropy: separated count exceeds the length bound");
        }
    return out;
}

GrowthGap entropy_growth_gap(const AnosovMap& map, Tag tag, const TorusPoint& x,
                             const GapOptions& opt) {
    GrowthGap out;
    out.growth = geometric_growth(map, tag, x, opt.growth);
    out.entropy = leaf_entropy(map, tag, x, opt.entropy);
    out.chi = out.growth.chi;
    out.rate = out.entropy.value;
    out.gap = out.chi - out.rate;
    return out;
}

}  // namespace anosov
