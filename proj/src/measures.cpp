#include "anosov/measures.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "anosov/util.hpp"

namespace anosov {

namespace {

// Weak-unstable jacobians down a backward orbit.  Neither plain push nor
// plain pull keeps a wu vector: forward push drifts to uu, backward pull
// to s.  So the unstable plane is pushed up from a deep seed (stable),
// the wu direction is pulled down from a leaf_direction seed at the top
// and re-projected onto the plane at each step (in-plane pull favors wu,
// the projection removes the s drift), and jacobians are read off the
// true one-step images.
std::vector<double> wu_log_chain(const AnosovMap& map, const std::vector<TorusPoint>& pts) {
    const int terms = int(pts.size()) - 1;
    BundleOptions bopt;
    int plane_depth = depth_for_rate(
        std::abs(map.spectrum().alpha_of(Tag::s) / map.spectrum().alpha_of(Tag::wu)), bopt);
    PlaneSample deep = unstable_plane(map, pts[std::size_t(terms)], plane_depth);

    std::vector<Vec3> normal(pts.size());
    Vec3 u1 = deep.u1, u2 = deep.u2;
    normal[std::size_t(terms)] = normalized(cross(u1, u2));
    for (int j = terms; j >= 1; --j) {
        const Mat3 d = map.jacobian(pts[std::size_t(j)]);
        u1 = normalized(d * u1);
        Vec3 v2 = d * u2;
        u2 = normalized(v2 - u1 * dot(v2, u1));
        normal[std::size_t(j) - 1] = normalized(cross(u1, u2));
    }

    Vec3 e = leaf_direction(map, Tag::wu, pts[0]);
    std::vector<double> logs(std::size_t(terms), 0.0);
    for (int j = 1; j <= terms; ++j) {
        Vec3 raw = inverse(map.jacobian(pts[std::size_t(j)])) * e;
        const Vec3& n = normal[std::size_t(j)];
        e = normalized(raw - n * dot(raw, n));
        logs[std::size_t(j) - 1] = std::log(norm(map.jacobian(pts[std::size_t(j)]) * e));
    }
    return logs;
}

// Log one-step leaf jacobians at the first `terms` backward points of the
// tag's expanding view, seen from x: entry j-1 holds log J at the j-th
// preimage.  For uu and s the direction is resolved once at the deepest
// point and pushed forward through the chain (the stable propagation
// direction for those tags), and the push norms are exactly the
// jacobians the product needs.
std::vector<double> log_jacobian_chain(const AnosovMap& map, Tag tag, const TorusPoint& x,
                                       int terms) {
    MapView view(map, tag == Tag::s);
    std::vector<TorusPoint> pts(std::size_t(terms) + 1);
    pts[0] = x;
    for (int j = 1; j <= terms; ++j) pts[std::size_t(j)] = view.invert(pts[std::size_t(j) - 1]);
    if (tag == Tag::wu) return wu_log_chain(map, pts);

    Vec3 e = leaf_direction(map, tag, pts[std::size_t(terms)]);
    std::vector<double> logs(std::size_t(terms), 0.0);
    for (int j = terms; j >= 1; --j) {
        // The view's one-step derivative at pts[j].  In the backward view
        // the preimage under the view map is pts[j-1], already on hand, so
        // no fresh Newton solve is needed.
        Mat3 step = (tag == Tag::s) ? inverse(map.jacobian(pts[std::size_t(j) - 1]))
                                    : map.jacobian(pts[std::size_t(j)]);
        Vec3 image = step * e;
        double growth = norm(image);
        logs[std::size_t(j) - 1] = std::log(growth);
        e = image / growth;
    }
    return logs;
}

// Smallest truncation depth whose certified tail stays below tol for
// pairs up to chart apart.
int delta_terms(double lipschitz, double lambda, const DeltaOptions& opt) {
    if (lipschitz == 0.0) return 0;
    // Leaf distance j steps down is at most chart / lambda^j, so the
    // dropped log-ratio tail is bounded by lip * chart / (lambda^J (lambda - 1)).
    double need = lipschitz * opt.chart / (opt.tol * (lambda - 1.0));
    if (need <= 1.0) return 0;
    int terms = int(std::ceil(std::log(need) / std::log(lambda)));
    if (terms > opt.max_terms)
        throw NonConvergence("delta tail target " + format_double(opt.tol) + " needs " +
                             std::to_string(terms) + " terms, cap " +
                             std::to_string(opt.max_terms));
    return terms;
}

}  // namespace

double leaf_jacobian(const AnosovMap& map, Tag tag, const TorusPoint& x) {
    MapView view(map, tag == Tag::s);
    return norm(view.step_jacobian(x) * leaf_direction(map, tag, x));
}

DeltaMachine make_delta_machine(const AnosovMap& map, Tag tag, const ConeCertificate& cert,
                                const DeltaOptions& opt) {
    if (!(opt.tol > 0.0) || !(opt.chart > 0.0) || opt.max_terms < 1 || !(opt.safety >= 1.0) ||
        opt.lip_samples < 1 || !(opt.lip_radius > 0.0))
        throw ConfigError("make_delta_machine: bad options");
    double lambda = cert.leaf_expansion_min(tag);
    if (!(lambda > 1.0))
        throw TailBoundUnavailable(std::string("delta tail along ") + tag_name(tag) +
                                   ": certified one-step leaf expansion is " +
                                   format_double(lambda) + ", need > 1");

    DeltaMachine m;
    m.map = &map;
    m.tag = tag;
    m.lambda = lambda;
    m.opt = opt;

    // Leaf-wise Lipschitz constant of log J, measured as the worst chord
    // slope over sampled short arcs and padded by the safety factor.
    PointSampler draw = uniform_volume_sampler();
    GrowOptions grow;
    grow.step = std::min(grow.step, opt.lip_radius / 8.0);
    double worst = 0.0;
    for (int i = 0; i < opt.lip_samples; ++i) {
        TorusPoint z = draw(opt.seed, std::uint64_t(i));
        LeafSegment arc = grow_leaf(map, tag, z, opt.lip_radius, grow);
        double s0 = arc.arclength_of_param(0.0);
        double jz = std::log(leaf_jacobian(map, tag, TorusPoint(arc.at_param(0.0))));
        const double ends[2] = {0.0, arc.length()};
        for (double s : ends) {
            double d = std::abs(s - s0);
            if (d == 0.0) continue;
            LeafPoint p = arc.at_arclength(s);
            double je = std::log(leaf_jacobian(map, tag, TorusPoint(p.lift)));
            worst = std::max(worst, std::abs(je - jz) / d);
        }
    }
    m.lipschitz = opt.safety * worst;
    m.terms = delta_terms(m.lipschitz, m.lambda, opt);
    return m;
}

double delta_product(const DeltaMachine& m, const TorusPoint& x, const TorusPoint& y) {
    if (m.map == nullptr) throw ConfigError("delta_product: machine not initialized");
    if (m.terms == 0) return 1.0;
    std::vector<double> lx = log_jacobian_chain(*m.map, m.tag, x, m.terms);
    std::vector<double> ly = log_jacobian_chain(*m.map, m.tag, y, m.terms);
    KahanSum s;
    for (int j = 0; j < m.terms; ++j) s.add(ly[std::size_t(j)] - lx[std::size_t(j)]);
    return std::exp(s.value());
}

LeafDensity leaf_density(const DeltaMachine& m, const LeafSegment& arc) {
    if (m.map == nullptr) throw ConfigError("leaf_density: machine not initialized");
    if (arc.tag != m.tag) throw ConfigError("leaf_density: arc tag does not match the machine");
    if (arc.size() < 2) throw ConfigError("leaf_density: arc has fewer than two vertices");
    if (arc.length() > m.opt.chart)
        throw ConfigError("leaf_density: arc longer than the machine's chart scale");

    TorusPoint ref(arc.at_param(0.0));
    std::vector<double> lref;
    if (m.terms > 0) lref = log_jacobian_chain(*m.map, m.tag, ref, m.terms);

    LeafDensity out;
    out.density.resize(arc.size(), 1.0);
    for (std::size_t i = 0; i < arc.size() && m.terms > 0; ++i) {
        std::vector<double> lv = log_jacobian_chain(*m.map, m.tag, TorusPoint(arc.vertex[i]),
                                                    m.terms);
        KahanSum s;
        for (int j = 0; j < m.terms; ++j) s.add(lref[std::size_t(j)] - lv[std::size_t(j)]);
        out.density[i] = std::exp(s.value());
    }

    KahanSum mass;
    for (std::size_t i = 0; i + 1 < arc.size(); ++i)
        mass.add((arc.cumlen[i + 1] - arc.cumlen[i]) * 0.5 *
                 (out.density[i] + out.density[i + 1]));
    out.normalization = mass.value();
    if (!(out.normalization > 0.0)) throw Error("leaf_density: nonpositive arc mass");
    for (double& v : out.density) v /= out.normalization;
    return out;
}

double EmpiricalMeasure::cos_moment(int k0, int k1, int k2) const {
    for (std::size_t i = 0; i < wave.size(); ++i) {
        const auto& w = wave[i];
        if ((w[0] == k0 && w[1] == k1 && w[2] == k2) ||
            (w[0] == -k0 && w[1] == -k1 && w[2] == -k2))
            return moment_cos[i];
    }
    throw ConfigError("cos_moment: wave vector outside the stored range");
}

double EmpiricalMeasure::sin_moment(int k0, int k1, int k2) const {
    for (std::size_t i = 0; i < wave.size(); ++i) {
        const auto& w = wave[i];
        if (w[0] == k0 && w[1] == k1 && w[2] == k2) return moment_sin[i];
        if (w[0] == -k0 && w[1] == -k1 && w[2] == -k2) return -moment_sin[i];
    }
    throw ConfigError("sin_moment: wave vector outside the stored range");
}

EmpiricalMeasure ac_invariant_measure(const AnosovMap& map, Tag tag, const LeafSegment& seed_leaf,
                                      int depth, int samples, std::uint64_t seed) {
    if (depth < 1 || samples < 1)
        throw ConfigError("ac_invariant_measure: need depth >= 1 and samples >= 1");
    if (seed_leaf.tag != tag)
        throw ConfigError("ac_invariant_measure: seed leaf belongs to another foliation");
    if (seed_leaf.size() < 2 || !(seed_leaf.length() > 0.0))
        throw ConfigError("ac_invariant_measure: degenerate seed leaf");

    EmpiricalMeasure em;
    em.tag = tag;
    em.depth = depth;
    em.seed = seed;
    em.seed_base = seed_leaf.base;
    em.seed_radius = 0.5 * seed_leaf.length();
    // One representative per +-k pair of nonzero wave vectors with
    // |k|^2 <= 3; the other half follows by symmetry of cos and sin.
    for (int k0 = -1; k0 <= 1; ++k0)
        for (int k1 = -1; k1 <= 1; ++k1)
            for (int k2 = -1; k2 <= 1; ++k2) {
                if (k0 == 0 && k1 == 0 && k2 == 0) continue;
                if (k0 < 0 || (k0 == 0 && (k1 < 0 || (k1 == 0 && k2 < 0)))) continue;
                em.wave.push_back({k0, k1, k2});
            }

    MapView view(map, tag == Tag::s);
    em.sample.resize(std::size_t(samples));
    for (int i = 0; i < samples; ++i) {
        std::mt19937_64 rng(derive_seed(seed, std::uint64_t(i)));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        double s = u(rng) * seed_leaf.length();
        int n = std::min(depth - 1, int(u(rng) * double(depth)));
        TorusPoint x(seed_leaf.at_arclength(s).lift);
        for (int k = 0; k < n; ++k) x = view.apply(x);
        em.sample[std::size_t(i)] = x;
    }
    em.weight.assign(std::size_t(samples), 1.0 / double(samples));

    const std::size_t nw = em.wave.size();
    std::vector<KahanSum> cur_c(nw), cur_s(nw), nxt_c(nw), nxt_s(nw);
    for (const TorusPoint& x : em.sample) {
        // The defect battery compares against one application of f
        // itself; for the s tag that is the inverse of the pushing view,
        // which leaves the mixture's defect structure unchanged.
        TorusPoint y = map.apply(x);
        for (std::size_t w = 0; w < nw; ++w) {
            double ax = kTwoPi * (em.wave[w][0] * x.r.x + em.wave[w][1] * x.r.y +
                                  em.wave[w][2] * x.r.z);
            double ay = kTwoPi * (em.wave[w][0] * y.r.x + em.wave[w][1] * y.r.y +
                                  em.wave[w][2] * y.r.z);
            cur_c[w].add(std::cos(ax));
            cur_s[w].add(std::sin(ax));
            nxt_c[w].add(std::cos(ay));
            nxt_s[w].add(std::sin(ay));
        }
    }

    em.moment_cos.resize(nw);
    em.moment_sin.resize(nw);
    double defect = 0.0;
    for (std::size_t w = 0; w < nw; ++w) {
        em.moment_cos[w] = cur_c[w].value() / double(samples);
        em.moment_sin[w] = cur_s[w].value() / double(samples);
        defect = std::max(defect,
                          std::abs(nxt_c[w].value() / double(samples) - em.moment_cos[w]));
        defect = std::max(defect,
                          std::abs(nxt_s[w].value() / double(samples) - em.moment_sin[w]));
    }
    em.invariance_defect = defect;
    return em;
}

LyapunovEstimate lebesgue_exponent(const AnosovMap& map, Tag tag, const EmpiricalMeasure& mu) {
    if (mu.tag != tag) throw ConfigError("lebesgue_exponent: measure built for another tag");
    if (mu.sample.empty() || mu.sample.size() != mu.weight.size())
        throw ConfigError("lebesgue_exponent: empty or inconsistent measure");

    std::vector<double> logs(mu.sample.size());
    KahanSum acc;
    for (std::size_t i = 0; i < mu.sample.size(); ++i) {
        logs[i] = std::log(leaf_jacobian(map, tag, mu.sample[i]));
        acc.add(mu.weight[i] * logs[i]);
    }
    const double mean = acc.value();
    KahanSum var;
    for (std::size_t i = 0; i < logs.size(); ++i)
        var.add(mu.weight[i] * (logs[i] - mean) * (logs[i] - mean));

    LyapunovEstimate est;
    est.tag = tag;
    est.value = mean;
    est.std_error = std::sqrt(std::max(0.0, var.value()) / double(logs.size()));
    est.n = mu.depth;
    est.ensemble = int(mu.sample.size());
    est.seed = mu.seed;
    return est;
}

SaghinXiaCheck saghin_xia_check(const AnosovMap& map, Tag tag, const EmpiricalMeasure& mu,
                                const std::vector<TorusPoint>& bases, const GrowthOptions& opt) {
    if (bases.empty()) throw ConfigError("saghin_xia_check: need at least one growth base");

    SaghinXiaCheck check;
    check.tag = tag;
    check.lambda = lebesgue_exponent(map, tag, mu);
    check.chi = chi_sup(map, tag, bases, opt);
    check.slack = check.chi.mean - check.lambda.value;

    const double b = double(check.chi.per_base.size());
    KahanSum fit2, spread;
    for (const GrowthSeries& g : check.chi.per_base) {
        fit2.add(g.chi_stderr * g.chi_stderr);
        spread.add((g.chi - check.chi.mean) * (g.chi - check.chi.mean));
    }
    double chi_var = fit2.value() / (b * b);
    if (b > 1.0) chi_var += spread.value() / (b * (b - 1.0));
    check.sigma = std::sqrt(chi_var + check.lambda.std_error * check.lambda.std_error);
    return check;
}

}  // namespace anosov
