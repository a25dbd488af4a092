#include "anosov/conjugacy.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "anosov/errors.hpp"
#include "anosov/util.hpp"

namespace anosov {

namespace {

// Forward orbit rounding grows by the strong rate per step, backward by
// the reciprocal of the stable rate.  The backward constant is larger
// because every step is a Newton solve at its own tolerance.
constexpr double kFwdStepNoise = 2e-15;
constexpr double kBwdStepNoise = 5e-14;
constexpr int kSeriesCap = 400;
constexpr double kStallFloor = 1e-5;

double frob(const Mat3& m) {
    double s = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) s += m.m[i][j] * m.m[i][j];
    return std::sqrt(s);
}

struct ComponentBudget {
    double coeff_sup = 0.0;  // sup |p_i|
    double lip = 0.0;        // sup |grad p_i|
};

ComponentBudget component_budget(const PerturbationField& p, const Vec3& codir) {
    ComponentBudget b;
    double sc = 0.0, sl = 0.0;
    for (const FourierMode& mo : p.modes()) {
        double amp = std::hypot(dot(codir, mo.cos_amp), dot(codir, mo.sin_amp));
        double freq = std::sqrt(double(mo.k[0] * mo.k[0] + mo.k[1] * mo.k[1] + mo.k[2] * mo.k[2]));
        sc += amp;
        sl += freq * amp;
    }
    b.coeff_sup = std::abs(p.epsilon()) / kTwoPi * sc;
    b.lip = std::abs(p.epsilon()) * sl;
    return b;
}

// Retained term count minimizing dropped tail plus accumulated orbit
// noise; expanding components walk the forward orbit, the stable one the
// backward orbit.  Plain tail truncation would keep summing terms whose
// orbit input has already decohered, which for the weak-unstable series
// makes the result worse, not better.
struct Truncation {
    int terms = 0;
    double bound = 0.0;
};

Truncation choose_truncation(double alpha_abs, bool expanding, const ComponentBudget& b,
                             double growth, double step_noise, double tol) {
    Truncation tr;
    if (b.coeff_sup == 0.0) return tr;
    double tail = expanding ? b.coeff_sup / (alpha_abs - 1.0) : b.coeff_sup / (1.0 - alpha_abs);
    double weight = 1.0;        // |alpha|^{-k} resp. |alpha|^{k} of the next term
    double orbit_err = 0.0;     // accumulated rounding at the next term's orbit point
    double noise = 0.0;
    tr.bound = tail;
    for (int k = 1; k <= kSeriesCap; ++k) {
        weight *= expanding ? 1.0 / alpha_abs : alpha_abs;
        tail *= expanding ? 1.0 / alpha_abs : alpha_abs;
        orbit_err = orbit_err * growth + step_noise;
        noise += weight * b.lip * orbit_err;
        double bound = tail + noise;
        if (bound < tr.bound) {
            tr.bound = bound;
            tr.terms = k;
        }
        if (tail <= tol && bound <= tr.bound) break;
        if (noise > tr.bound) break;  // past the optimum, only getting worse
    }
    return tr;
}

struct Evaluator {
    const AnosovMap* map = nullptr;
    const ConjugacySeries* series = nullptr;
    Vec3 right[3];
    Vec3 left[3];
    double inv_alpha[2] = {0, 0};  // signed, for uu and wu
    double alpha_s = 0.0;          // signed

    explicit Evaluator(const AnosovMap& m, const ConjugacySeries& s) : map(&m), series(&s) {
        const Spectrum& sp = m.spectrum();
        for (int i = 0; i < 3; ++i) {
            right[i] = sp.right[i];
            left[i] = sp.left[i];
        }
        inv_alpha[0] = 1.0 / sp.alpha[0];
        inv_alpha[1] = 1.0 / sp.alpha[1];
        alpha_s = sp.alpha[2];
    }

    Vec3 displacement(const Vec3& x) const {
        const auto& terms = series->terms;
        if (terms[0] == 0 && terms[1] == 0 && terms[2] == 0) return {0, 0, 0};
        double acc[3] = {0, 0, 0};
        int kf = std::max(terms[0], terms[1]);
        if (kf > 0) {
            TorusPoint y(x);
            double w0 = 1.0, w1 = 1.0;
            for (int k = 1; k <= kf; ++k) {
                Vec3 pv = map->perturbation().value(y.r);
                if (k <= terms[0]) {
                    w0 *= inv_alpha[0];
                    acc[0] += w0 * dot(left[0], pv);
                }
                if (k <= terms[1]) {
                    w1 *= inv_alpha[1];
                    acc[1] += w1 * dot(left[1], pv);
                }
                if (k < kf) y = map->apply(y);
            }
        }
        if (terms[2] > 0) {
            TorusPoint z(x);
            double w2 = 1.0;
            for (int k = 0; k < terms[2]; ++k) {
                z = map->inverse_apply(z);
                acc[2] -= w2 * dot(left[2], map->perturbation().value(z.r));
                w2 *= alpha_s;
            }
        }
        return right[0] * acc[0] + right[1] * acc[1] + right[2] * acc[2];
    }

    // Twisted-equation defect p(x) + u(Fx) - A u(x) with the two
    // displacement sums sharing one orbit; algebraically identical to
    // H(Fx) - A H(x) but free of large-lift cancellation.
    Vec3 defect(const Vec3& x) const {
        const auto& terms = series->terms;
        Vec3 p0 = map->perturbation().value(x);
        if (terms[0] == 0 && terms[1] == 0 && terms[2] == 0) return p0;
        int kf = std::max(terms[0], terms[1]);
        double ax[3] = {0, 0, 0};   // components of u(x)
        double afx[3] = {0, 0, 0};  // components of u(Fx)
        TorusPoint y(x);
        std::vector<Vec3> pf(std::size_t(kf) + 1);
        pf[0] = p0;
        for (int k = 1; k <= kf; ++k) {
            y = map->apply(y);
            pf[std::size_t(k)] = map->perturbation().value(y.r);
        }
        for (int i = 0; i < 2; ++i) {
            double w = 1.0;
            for (int k = 1; k <= terms[i]; ++k) {
                w *= inv_alpha[i];
                ax[i] += w * dot(left[i], pf[std::size_t(k - 1)]);
                afx[i] += w * dot(left[i], pf[std::size_t(k)]);
            }
        }
        if (terms[2] > 0) {
            // Term k of u(Fx) reads F^{-k}x, term k of u(x) reads
            // F^{-k-1}x, so one backward walk feeds both sums.
            TorusPoint z(x);
            double w = 1.0;
            double c = dot(left[2], p0);
            for (int k = 0; k < terms[2]; ++k) {
                afx[2] -= w * c;
                z = map->inverse_apply(z);
                c = dot(left[2], map->perturbation().value(z.r));
                ax[2] -= w * c;
                w *= alpha_s;
            }
        }
        Vec3 ux = right[0] * ax[0] + right[1] * ax[1] + right[2] * ax[2];
        Vec3 ufx = right[0] * afx[0] + right[1] * afx[1] + right[2] * afx[2];
        return p0 + ufx - map->linear_mat() * ux;
    }
};

Vec3 wrap_nearest(const Vec3& v) {
    return {v.x - std::nearbyint(v.x), v.y - std::nearbyint(v.y), v.z - std::nearbyint(v.z)};
}

std::uint64_t cell_key(long long i, long long j, long long k, long long m) {
    auto w = [m](long long t) { return std::uint64_t(((t % m) + m) % m); };
    std::uint64_t h = splitmix64(w(i));
    h = splitmix64(h ^ w(j));
    return splitmix64(h ^ w(k));
}

}  // namespace

Vec3 PeriodicField::operator()(const Vec3& x) const {
    if (n <= 0) throw ConfigError("PeriodicField: empty field");
    double fx = mod1(x.x) * n, fy = mod1(x.y) * n, fz = mod1(x.z) * n;
    int i0 = int(fx) % n, j0 = int(fy) % n, k0 = int(fz) % n;
    double tx = fx - std::floor(fx), ty = fy - std::floor(fy), tz = fz - std::floor(fz);
    int i1 = (i0 + 1) % n, j1 = (j0 + 1) % n, k1 = (k0 + 1) % n;
    Vec3 c00 = at(i0, j0, k0) * (1 - tx) + at(i1, j0, k0) * tx;
    Vec3 c10 = at(i0, j1, k0) * (1 - tx) + at(i1, j1, k0) * tx;
    Vec3 c01 = at(i0, j0, k1) * (1 - tx) + at(i1, j0, k1) * tx;
    Vec3 c11 = at(i0, j1, k1) * (1 - tx) + at(i1, j1, k1) * tx;
    Vec3 c0 = c00 * (1 - ty) + c10 * ty;
    Vec3 c1 = c01 * (1 - ty) + c11 * ty;
    return c0 * (1 - tz) + c1 * tz;
}

double PeriodicField::sup_norm() const {
    double s = 0;
    for (const Vec3& v : value) s = std::max(s, norm(v));
    return s;
}

Vec3 conjugacy_displacement(const AnosovMap& map, const ConjugacySeries& series, const Vec3& x) {
    return Evaluator(map, series).displacement(x);
}

Vec3 conjugate_point(const AnosovMap& map, const ConjugacySeries& series, const Vec3& x) {
    return x + Evaluator(map, series).displacement(x);
}

ConjugacyMap solve_conjugacy(const AnosovMap& map, int grid_n, double tol) {
    if (grid_n < 2) throw ConfigError("solve_conjugacy: grid_n must be at least 2");
    if (!(tol > 0.0)) throw ConfigError("solve_conjugacy: tol must be positive");
    const Spectrum& sp = map.spectrum();

    ConjugacyMap out;
    out.series.tol = tol;
    Mat3 vmat;
    for (int i = 0; i < 3; ++i)
        for (int r = 0; r < 3; ++r) vmat.m[r][i] = sp.right[i][r];
    Mat3 vinv;
    for (int i = 0; i < 3; ++i)
        for (int c = 0; c < 3; ++c) vinv.m[i][c] = sp.left[i][c];
    out.series.basis_cond = frob(vmat) * frob(vinv);

    double growth_fwd = std::abs(sp.alpha[0]);
    double growth_bwd = 1.0 / std::abs(sp.alpha[2]);
    for (int i = 0; i < 3; ++i) {
        ComponentBudget b = component_budget(map.perturbation(), sp.left[i]);
        out.series.coeff_sup[std::size_t(i)] = b.coeff_sup;
        bool expanding = i < 2;
        Truncation tr = choose_truncation(std::abs(sp.alpha[i]), expanding, b,
                                          expanding ? growth_fwd : growth_bwd,
                                          expanding ? kFwdStepNoise : kBwdStepNoise, tol);
        if (tr.bound > kStallFloor)
            throw SeriesStall("solve_conjugacy: component " + std::string(tag_name(Tag(i))) +
                              " floors at " + format_double(tr.bound) +
                              "; weak expansion too close to 1 for double-precision orbits");
        out.series.terms[std::size_t(i)] = tr.terms;
        out.series.tail_bound[std::size_t(i)] = tr.bound;
    }

    Evaluator ev(map, out.series);
    out.u.n = grid_n;
    out.u.value.assign(std::size_t(grid_n) * std::size_t(grid_n) * std::size_t(grid_n), Vec3{});
    const double h = 1.0 / grid_n;
    parallel_for(out.u.value.size(), 0, [&](std::size_t idx) {
        int k = int(idx % std::size_t(grid_n));
        int j = int((idx / std::size_t(grid_n)) % std::size_t(grid_n));
        int i = int(idx / (std::size_t(grid_n) * std::size_t(grid_n)));
        out.u.value[idx] = ev.displacement({i * h, j * h, k * h});
    });

    // Residual on the dual (half-cell shifted) lattice, disjoint from the
    // sample points so it cannot flatter the stored field.
    out.residual_grid = grid_n;
    std::vector<double> defect(out.u.value.size());
    parallel_for(defect.size(), 0, [&](std::size_t idx) {
        int k = int(idx % std::size_t(grid_n));
        int j = int((idx / std::size_t(grid_n)) % std::size_t(grid_n));
        int i = int(idx / (std::size_t(grid_n) * std::size_t(grid_n)));
        defect[idx] = norm(wrap_nearest(ev.defect({(i + 0.5) * h, (j + 0.5) * h, (k + 0.5) * h})));
    });
    for (double d : defect) out.residual = std::max(out.residual, d);
    return out;
}

SemiconjugacyCheck verify_semiconjugacy(const AnosovMap& map, const ConjugacyMap& conj, int grid_n) {
    if (grid_n < 2) throw ConfigError("verify_semiconjugacy: grid_n must be at least 2");
    SemiconjugacyCheck check;
    check.grid_n = grid_n;
    Evaluator ev(map, conj.series);
    const std::size_t total = std::size_t(grid_n) * std::size_t(grid_n) * std::size_t(grid_n);
    const double h = 1.0 / grid_n;
    std::vector<double> defect(total);
    std::vector<Vec3> image(total);
    parallel_for(total, 0, [&](std::size_t idx) {
        int k = int(idx % std::size_t(grid_n));
        int j = int((idx / std::size_t(grid_n)) % std::size_t(grid_n));
        int i = int(idx / (std::size_t(grid_n) * std::size_t(grid_n)));
        Vec3 x{i * h, j * h, k * h};
        defect[idx] = norm(wrap_nearest(ev.defect(x)));
        Vec3 im = x + ev.displacement(x);
        image[idx] = {mod1(im.x), mod1(im.y), mod1(im.z)};
    });
    for (double d : defect) check.residual = std::max(check.residual, d);

    // Near-coincident images from distant sources, via exact bucket
    // probing: cells are image_tol wide, so any offending pair lands in
    // the same or an adjacent cell.
    const long long m = std::llround(1.0 / check.image_tol);
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> bucket;
    bucket.reserve(total * 2);
    auto source_of = [&](std::size_t idx) {
        int k = int(idx % std::size_t(grid_n));
        int j = int((idx / std::size_t(grid_n)) % std::size_t(grid_n));
        int i = int(idx / (std::size_t(grid_n) * std::size_t(grid_n)));
        return TorusPoint(i * h, j * h, k * h);
    };
    for (std::size_t idx = 0; idx < total; ++idx) {
        const Vec3& im = image[idx];
        long long ci = (long long)std::floor(im.x * double(m));
        long long cj = (long long)std::floor(im.y * double(m));
        long long ck = (long long)std::floor(im.z * double(m));
        TorusPoint a(im);
        for (long long di = -1; di <= 1; ++di)
            for (long long dj = -1; dj <= 1; ++dj)
                for (long long dk = -1; dk <= 1; ++dk) {
                    auto it = bucket.find(cell_key(ci + di, cj + dj, ck + dk, m));
                    if (it == bucket.end()) continue;
                    for (std::uint32_t other : it->second) {
                        TorusPoint b(image[other]);
                        if (torus_dist(a, b) > check.image_tol) continue;
                        if (torus_dist(source_of(idx), source_of(other)) > check.source_tol)
                            ++check.collisions;
                    }
                }
        bucket[cell_key(ci, cj, ck, m)].push_back(std::uint32_t(idx));
    }
    check.injective_proxy = check.collisions == 0;
    return check;
}

FoliationImageCheck foliation_image_check(const AnosovMap& map, const ConjugacyMap& conj, Tag tag,
                                          const TorusPoint& x, double radius,
                                          const GrowOptions& grow) {
    if (!(radius > 0.0)) throw ConfigError("foliation_image_check: radius must be positive");
    LeafSegment arc = grow_leaf(map, tag, x, radius, grow);
    Evaluator ev(map, conj.series);
    const Spectrum& sp = map.spectrum();
    Vec3 line = sp.dir(tag);
    Vec3 plane_normal = (tag == Tag::s) ? normalized(cross(sp.dir(Tag::s), sp.dir(Tag::wu)))
                                        : normalized(cross(sp.dir(Tag::uu), sp.dir(Tag::wu)));

    FoliationImageCheck out;
    out.tag = tag;
    out.radius = radius;
    Vec3 base = arc.at_param(0.0);
    Vec3 h0 = base + ev.displacement(base);
    const int samples = 64;
    out.samples = samples + 1;
    for (int i = 0; i <= samples; ++i) {
        double t = arc.param.front() + (arc.param.back() - arc.param.front()) * double(i) / samples;
        Vec3 v = arc.at_param(t);
        Vec3 w = v + ev.displacement(v) - h0;
        out.line = std::max(out.line, norm(w - line * dot(line, w)));
        out.plane = std::max(out.plane, std::abs(dot(plane_normal, w)));
    }
    return out;
}

const char* verdict_name(RegularityVerdict v) {
    switch (v) {
        case RegularityVerdict::c1_consistent: return "c1-consistent";
        case RegularityVerdict::sub_lipschitz: return "sub-lipschitz";
        default: return "inconclusive";
    }
}

RegularityReport leafwise_regularity_probe(const AnosovMap& map, const ConjugacyMap& conj, Tag tag,
                                           const std::vector<TorusPoint>& bases,
                                           const RegularityOptions& opt) {
    if (bases.empty()) throw ConfigError("leafwise_regularity_probe: need at least one base point");
    if (opt.levels < 3) throw ConfigError("leafwise_regularity_probe: need at least three scales");
    if (!(opt.radius > 0.0)) throw ConfigError("leafwise_regularity_probe: radius must be positive");

    RegularityReport rep;
    rep.tag = tag;
    rep.base = bases;
    rep.scale.resize(std::size_t(opt.levels));
    for (int j = 0; j < opt.levels; ++j) rep.scale[std::size_t(j)] = opt.radius * std::pow(2.0, -j);

    // Fit window: drop the coarsest scales (transient geometry) and any
    // scale the evaluation resolution cannot support.
    std::vector<int> kept;
    for (int j = opt.skip_coarse; j < opt.levels; ++j)
        if (rep.scale[std::size_t(j)] >= opt.floor * opt.floor_factor) kept.push_back(j);
    if (kept.size() < 3)
        throw ScaleBelowResolution("leafwise_regularity_probe: fewer than three usable scales above " +
                                   format_double(opt.floor * opt.floor_factor));

    Evaluator ev(map, conj.series);
    Vec3 line = map.spectrum().dir(tag);
    std::vector<KahanSum> pooled(std::size_t(opt.levels));
    for (const TorusPoint& b : bases) {
        LeafSegment arc = grow_leaf(map, tag, b, opt.radius, opt.grow);
        Vec3 v0 = arc.at_param(0.0);
        Vec3 h0 = v0 + ev.displacement(v0);
        for (int j = 0; j < opt.levels; ++j) {
            double d = rep.scale[std::size_t(j)];
            for (double side : {-d, d}) {
                Vec3 v = arc.at_param(side);
                Vec3 w = v + ev.displacement(v) - h0;
                pooled[std::size_t(j)].add(std::abs(dot(line, w)));
            }
        }
    }

    rep.quotient.resize(std::size_t(opt.levels));
    for (int j = 0; j < opt.levels; ++j) {
        double mean = pooled[std::size_t(j)].value() / double(pooled[std::size_t(j)].count());
        rep.quotient[std::size_t(j)] = mean / rep.scale[std::size_t(j)];
    }

    std::vector<double> lx, ly;
    for (int j : kept) {
        double mean = rep.quotient[std::size_t(j)] * rep.scale[std::size_t(j)];
        if (!(mean > 0.0))
            throw ScaleBelowResolution("leafwise_regularity_probe: vanishing displacement at scale " +
                                       format_double(rep.scale[std::size_t(j)]));
        lx.push_back(std::log(rep.scale[std::size_t(j)]));
        ly.push_back(std::log(mean));
    }
    LinearFit fit = linear_fit(lx, ly);
    rep.exponent = fit.slope;
    rep.exponent_stderr = fit.slope_stderr;

    double qf = rep.quotient[std::size_t(kept.back())];
    double qn = rep.quotient[std::size_t(kept[kept.size() - 2])];
    rep.stabilization = std::abs(qf / qn - 1.0);

    if (rep.exponent < 1.0 - opt.c1_band)
        rep.verdict = RegularityVerdict::sub_lipschitz;
    else if (std::abs(rep.exponent - 1.0) <= opt.c1_band && rep.stabilization <= opt.stabilization_band)
        rep.verdict = RegularityVerdict::c1_consistent;
    else
        rep.verdict = RegularityVerdict::inconclusive;
    return rep;
}

}  // namespace anosov
