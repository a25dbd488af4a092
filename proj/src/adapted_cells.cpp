// Conditional entropy of a foliation via adapted partition cells.
//
// The partition element at x is the component through x of the leaf
// intersected with the dyadic cube containing x.  Level R refines it to
// the points whose first R forward images (in the tag's expanding view)
// stay in the cubes of the corresponding images of x.  The conditional
// mass ratio of the level-R cell decays like exp(-R h), so the slope of
// the sampled mean of -log mass over R estimates the entropy rate.
// Cells are intervals in the root arc parameter whenever the refinement
// is adapted; each cell is audited for that and failures are tolerated
// only up to a configured fraction.

#include <algorithm>
#include <cmath>

#include "anosov/measures.hpp"
#include "anosov/util.hpp"

namespace anosov {

namespace {

struct Cube {
    Vec3 lo, hi;

    bool contains(const TorusPoint& p) const {
        for (int i = 0; i < 3; ++i)
            if (p.r[i] < lo[i] || p.r[i] >= hi[i]) return false;
        return true;
    }
};

Cube cube_at(const TorusPoint& x, int resolution) {
    double side = std::ldexp(1.0, -resolution);
    Cube c;
    for (int i = 0; i < 3; ++i) {
        double edge = std::floor(x.r[i] / side) * side;
        c.lo[i] = edge;
        c.hi[i] = edge + side;
    }
    return c;
}

// Piecewise-linear mass profile of a density sampled on a uniform
// parameter grid; masses of tiny subintervals stay first-order accurate
// because the profile is interpolated, not re-quadratured.
struct MassProfile {
    double lo = 0.0, hi = 0.0;
    std::vector<double> cum;  // cumulative trapezoid of the density

    double at(double t) const {
        if (t <= lo) return 0.0;
        if (t >= hi) return cum.back();
        double step = (hi - lo) / double(cum.size() - 1);
        double u = (t - lo) / step;
        std::size_t i = std::min(std::size_t(u), cum.size() - 2);
        return cum[i] + (u - double(i)) * (cum[i + 1] - cum[i]);
    }
    double mass(double a, double b) const { return at(b) - at(a); }
};

struct CellTracker {
    const AnosovMap* map;
    MapView view;
    const LeafSegment* arc;
    const ConditionalEntropyOptions* opt;
    std::vector<TorusPoint> chain;  // forward view orbit of the base
    std::vector<Cube> cube;

    CellTracker(const AnosovMap& m, Tag tag, const LeafSegment& a,
                const ConditionalEntropyOptions& o)
        : map(&m), view(m, tag == Tag::s), arc(&a), opt(&o) {
        chain.resize(std::size_t(o.depth) + 1);
        cube.resize(chain.size());
        chain[0] = TorusPoint(a.at_param(0.0));
        cube[0] = cube_at(chain[0], o.resolution);
        for (int k = 1; k <= o.depth; ++k) {
            chain[std::size_t(k)] = view.apply(chain[std::size_t(k) - 1]);
            cube[std::size_t(k)] = cube_at(chain[std::size_t(k)], o.resolution);
        }
    }

    // Does the k-th view image of the root point at parameter t share the
    // cube of the k-th image of the base?
    bool inside(int k, double t) const {
        TorusPoint p(arc->at_param(t));
        for (int j = 0; j < k; ++j) p = view.apply(p);
        return cube[std::size_t(k)].contains(p);
    }

    // First exit along [0, limit] (signed direction via limit's sign);
    // scans outward, then bisects the bracketing interval.  Returns limit
    // itself when no exit is seen.
    double boundary(int k, double limit, bool* exited) const {
        double last_in = 0.0, first_out = 0.0;
        bool found = false;
        for (int i = 1; i <= opt->scan; ++i) {
            double t = limit * double(i) / double(opt->scan);
            if (inside(k, t)) {
                last_in = t;
            } else {
                first_out = t;
                found = true;
                break;
            }
        }
        *exited = found;
        if (!found) return limit;
        for (int i = 0; i < opt->bisect; ++i) {
            double mid = 0.5 * (last_in + first_out);
            if (inside(k, mid))
                last_in = mid;
            else
                first_out = mid;
        }
        return last_in;
    }
};

}  // namespace

ConditionalEntropyEstimate conditional_entropy(const AnosovMap& map, Tag tag,
                                               const ConeCertificate& cert,
                                               const EmpiricalMeasure& mu,
                                               const ConditionalEntropyOptions& opt) {
    if (opt.resolution < 1 || opt.depth < 2 || opt.samples < 2 || !(opt.radius > 0.0) ||
        opt.scan < 2 || opt.bisect < 8 || opt.density_grid < 8 ||
        !(opt.adaptedness_tolerance >= 0.0))
        throw ConfigError("conditional_entropy: bad options");
    if (mu.tag != tag) throw ConfigError("conditional_entropy: measure built for another tag");
    if (mu.sample.size() < std::size_t(opt.samples))
        throw ConfigError("conditional_entropy: measure holds fewer samples than requested");

    DeltaMachine machine = make_delta_machine(map, tag, cert, opt.delta);
    const std::size_t stride = mu.sample.size() / std::size_t(opt.samples);

    std::vector<KahanSum> neglog(std::size_t(opt.depth) + 1);
    int good = 0, bad = 0;

    for (int i = 0; i < opt.samples; ++i) {
        TorusPoint x = mu.sample[std::size_t(i) * stride];
        LeafSegment arc = grow_leaf(map, tag, x, opt.radius, opt.grow);
        CellTracker cells(map, tag, arc, opt);

        // Root cell: the component of leaf-inside-cube through the base.
        bool exited_hi = false, exited_lo = false;
        double hi = cells.boundary(0, arc.param.back(), &exited_hi);
        double lo = cells.boundary(0, arc.param.front(), &exited_lo);
        if (!exited_hi || !exited_lo)
            throw ResolutionTooCoarse(
                "conditional_entropy: leaf arc ends inside its cube; raise radius above the "
                "cube diameter along the leaf");

        // Conditional mass profile over the root cell.
        LeafSegment window;
        window.tag = arc.tag;
        window.backward = arc.backward;
        window.base = arc.base;
        int g = opt.density_grid;
        window.param.resize(std::size_t(g));
        window.vertex.resize(std::size_t(g));
        window.cumlen.resize(std::size_t(g));
        for (int j = 0; j < g; ++j) {
            double t = lo + (hi - lo) * double(j) / double(g - 1);
            window.param[std::size_t(j)] = t;
            window.vertex[std::size_t(j)] = arc.at_param(t);
            window.cumlen[std::size_t(j)] = arc.arclength_of_param(t);
        }
        double offset = window.cumlen[0];
        for (int j = 0; j < g; ++j) window.cumlen[std::size_t(j)] -= offset;
        LeafDensity dens = leaf_density(machine, window);

        MassProfile profile;
        profile.lo = lo;
        profile.hi = hi;
        profile.cum.resize(std::size_t(g), 0.0);
        for (int j = 1; j < g; ++j)
            profile.cum[std::size_t(j)] =
                profile.cum[std::size_t(j) - 1] +
                (window.cumlen[std::size_t(j)] - window.cumlen[std::size_t(j) - 1]) * 0.5 *
                    (dens.density[std::size_t(j)] + dens.density[std::size_t(j) - 1]);

        double mass0 = profile.mass(lo, hi);
        bool ok = mass0 > 0.0 && cells.inside(0, 0.0);
        std::vector<double> levels(std::size_t(opt.depth) + 1, 0.0);
        for (int k = 1; k <= opt.depth && ok; ++k) {
            if (!cells.inside(k, 0.0)) {
                ok = false;
                break;
            }
            bool dummy = false;
            hi = cells.boundary(k, hi, &dummy);
            lo = cells.boundary(k, lo, &dummy);
            // Interval audit: the refined cell must stay connected.
            for (int j = 1; j <= 8 && ok; ++j)
                if (!cells.inside(k, lo + (hi - lo) * double(j) / 9.0)) ok = false;
            double mk = profile.mass(lo, hi) / mass0;
            if (!(mk > 0.0)) ok = false;
            if (ok) levels[std::size_t(k)] = -std::log(mk);
        }

        if (!ok) {
            ++bad;
            continue;
        }
        ++good;
        for (int k = 0; k <= opt.depth; ++k) neglog[std::size_t(k)].add(levels[std::size_t(k)]);
    }

    double fraction = double(bad) / double(opt.samples);
    if (fraction > opt.adaptedness_tolerance)
        throw AdaptednessViolation("conditional_entropy: " + std::to_string(bad) + " of " +
                                   std::to_string(opt.samples) +
                                   " cells failed the refinement audit");
    if (good < 2) throw Error("conditional_entropy: too few usable cells");

    ConditionalEntropyEstimate est;
    est.tag = tag;
    est.resolution = opt.resolution;
    est.depth = opt.depth;
    est.samples = good;
    est.violation_fraction = fraction;
    est.mean_neglog.resize(std::size_t(opt.depth) + 1);
    for (int k = 0; k <= opt.depth; ++k)
        est.mean_neglog[std::size_t(k)] = neglog[std::size_t(k)].value() / double(good);

    std::vector<double> ks, ys;
    for (int k = 1; k <= opt.depth; ++k) {
        ks.push_back(double(k));
        ys.push_back(est.mean_neglog[std::size_t(k)]);
    }
    LinearFit fit = linear_fit(ks, ys);
    est.value = fit.slope;
    est.value_stderr = fit.slope_stderr;
    return est;
}

}  // namespace anosov
