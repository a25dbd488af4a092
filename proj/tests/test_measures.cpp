#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "support/fixtures.hpp"

#include "anosov/bundles.hpp"
#include "anosov/cones.hpp"
#include "anosov/errors.hpp"
#include "anosov/growth.hpp"
#include "anosov/leaf.hpp"
#include "anosov/lyapunov.hpp"
#include "anosov/measures.hpp"

using namespace anosov;
using namespace anosov::fixtures;

namespace {

const TorusPoint kBase(Vec3{0.123, 0.456, 0.789});

ConeCertificate desk_certificate(const AnosovMap& map) {
    ConeRequest req;
    req.grid_n = 12;
    return verify_cone_condition(map, req);
}

// Sampling arcs only need on-leaf points, not tight polylines, so the
// integrator can stride coarsely.
LeafSegment sampling_arc(const AnosovMap& map, Tag tag, const TorusPoint& x, double radius) {
    GrowOptions g;
    g.step = 5e-3;
    return grow_leaf(map, tag, x, radius, g);
}

// Same polyline reparameterized so that at_param(0) sits on the pivot
// vertex: the density rebase used by the base-independence check.
LeafSegment rebase(const LeafSegment& arc, std::size_t pivot) {
    LeafSegment out = arc;
    double t0 = arc.param[pivot];
    for (double& t : out.param) t -= t0;
    out.base = TorusPoint(arc.vertex[pivot]);
    return out;
}

double worst_moment(const EmpiricalMeasure& mu) {
    double worst = 0.0;
    for (std::size_t w = 0; w < mu.wave.size(); ++w) {
        worst = std::max(worst, std::abs(mu.moment_cos[w]));
        worst = std::max(worst, std::abs(mu.moment_sin[w]));
    }
    return worst;
}

}  // namespace

TEST_CASE("linear leaf jacobians are the eigenvalue moduli") {
    AnosovMap map(reference_matrix(), PerturbationField{});
    const Spectrum& sp = map.spectrum();
    std::mt19937_64 rng(52ULL);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 5; ++i) {
        TorusPoint x(u(rng), u(rng), u(rng));
        CHECK(leaf_jacobian(map, Tag::uu, x) ==
              doctest::Approx(sp.alpha_of(Tag::uu)).epsilon(1e-12));
        CHECK(leaf_jacobian(map, Tag::wu, x) ==
              doctest::Approx(sp.alpha_of(Tag::wu)).epsilon(1e-12));
        // s is read in the backward view, where the leaf expands by the
        // reciprocal of the contraction factor.
        CHECK(leaf_jacobian(map, Tag::s, x) ==
              doctest::Approx(1.0 / std::abs(sp.alpha_of(Tag::s))).epsilon(1e-12));
    }
}

TEST_CASE("leaf jacobians satisfy the orbit chain rule") {
    AnosovMap map(reference_matrix(), volume_preserving_mode(0.05));
    const int n = 6;
    for (int trial = 0; trial < 4; ++trial) {
        TorusPoint x(Vec3{0.1 + 0.17 * trial, 0.8 - 0.13 * trial, 0.3 + 0.11 * trial});

        for (Tag tag : {Tag::uu, Tag::wu}) {
            Vec3 e = leaf_direction(map, tag, x);
            Mat3 m{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
            TorusPoint z = x;
            double prod = 1.0;
            for (int k = 0; k < n; ++k) {
                prod *= leaf_jacobian(map, tag, z);
                m = map.jacobian(z) * m;
                z = map.apply(z);
            }
            CHECK(prod == doctest::Approx(norm(m * e)).epsilon(1e-9));
        }

        // The s product multiplies one-step inverse jacobians down the
        // backward orbit and must match the pushed inverse cocycle.
        Vec3 e = leaf_direction(map, Tag::s, x);
        Mat3 m{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
        TorusPoint z = x;
        double prod = 1.0;
        for (int k = 0; k < n; ++k) {
            prod *= leaf_jacobian(map, Tag::s, z);
            TorusPoint z1 = map.inverse_apply(z);
            m = inverse(map.jacobian(z1)) * m;
            z = z1;
        }
        CHECK(prod == doctest::Approx(norm(m * e)).epsilon(1e-12));
    }
}

TEST_CASE("delta is identically one for the linear map") {
    AnosovMap map(reference_matrix(), PerturbationField{});
    ConeCertificate cert = desk_certificate(map);
    for (Tag tag : {Tag::uu, Tag::wu, Tag::s}) {
        DeltaMachine m = make_delta_machine(map, tag, cert);
        // Constant jacobian: the measured leaf Lipschitz constant is
        // rounding noise and the tail needs no terms at all.
        CHECK(m.lipschitz < 1e-9);
        CHECK(m.terms == 0);
        LeafSegment arc = sampling_arc(map, tag, kBase, 0.3);
        TorusPoint x(arc.at_param(-0.21)), y(arc.at_param(0.17));
        CHECK(delta_product(m, x, y) == 1.0);
    }
}

TEST_CASE("delta machines measure a positive tail budget on perturbed maps") {
    AnosovMap map(reference_matrix(), single_mode(0.05));
    ConeCertificate cert = desk_certificate(map);
    DeltaMachine m = make_delta_machine(map, Tag::uu, cert);
    CHECK(m.lipschitz > 0.01);
    CHECK(m.lambda > 2.0);
    CHECK(m.terms > 8);
    CHECK(m.terms < 80);

    // Reflexivity is exact: both chains are the same float sequence.
    LeafSegment arc = sampling_arc(map, Tag::uu, kBase, 0.2);
    TorusPoint x(arc.at_param(0.11));
    CHECK(delta_product(m, x, x) == 1.0);
}

TEST_CASE("delta satisfies the cocycle identity on leaf triples") {
    AnosovMap map(reference_matrix(), single_mode(0.05));
    ConeCertificate cert = desk_certificate(map);
    std::mt19937_64 rng(4031ULL);
    std::uniform_real_distribution<double> u(-0.28, 0.28);
    for (Tag tag : {Tag::uu, Tag::wu, Tag::s}) {
        DeltaMachine m = make_delta_machine(map, tag, cert);
        LeafSegment arc = sampling_arc(map, tag, kBase, 0.3);
        for (int trial = 0; trial < 12; ++trial) {
            TorusPoint x(arc.at_param(u(rng)));
            TorusPoint y(arc.at_param(u(rng)));
            TorusPoint z(arc.at_param(u(rng)));
            double dxy = delta_product(m, x, y);
            double dyz = delta_product(m, y, z);
            double dxz = delta_product(m, x, z);
            CHECK(std::abs(dxy * dyz / dxz - 1.0) < 1e-12);
            CHECK(std::abs(dxy * delta_product(m, y, x) - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("delta transforms by the jacobian ratio under one view step") {
    AnosovMap map(reference_matrix(), single_mode(0.05));
    ConeCertificate cert = desk_certificate(map);
    // The identity is exact in exact arithmetic; numerically the two
    // sides live on different backward chains, so the comparison floor
    // is the chain decoherence noise: small on uu, tiny on s (whose
    // chains are forward orbits), and percent-scale on the slow wu.
    struct Row {
        Tag tag;
        double tol;
    };
    for (Row row : {Row{Tag::uu, 5e-3}, Row{Tag::wu, 0.25}, Row{Tag::s, 1e-6}}) {
        DeltaMachine m = make_delta_machine(map, row.tag, cert);
        MapView view(map, row.tag == Tag::s);
        LeafSegment arc = sampling_arc(map, row.tag, kBase, 0.2);
        TorusPoint x(arc.at_param(-0.12)), y(arc.at_param(0.15));
        double lhs = delta_product(m, view.apply(x), view.apply(y));
        double rhs = delta_product(m, x, y) * leaf_jacobian(map, row.tag, y) /
                     leaf_jacobian(map, row.tag, x);
        CHECK(std::abs(lhs / rhs - 1.0) < row.tol);
    }
}

TEST_CASE("leaf densities normalize and follow delta ratios") {
    AnosovMap map(reference_matrix(), single_mode(0.05));
    ConeCertificate cert = desk_certificate(map);
    DeltaMachine m = make_delta_machine(map, Tag::uu, cert);
    LeafSegment arc = sampling_arc(map, Tag::uu, kBase, 0.2);
    LeafDensity ld = leaf_density(m, arc);
    REQUIRE(ld.density.size() == arc.size());
    CHECK(ld.normalization > 0.0);

    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < arc.size(); ++i)
        mass += (arc.cumlen[i + 1] - arc.cumlen[i]) * 0.5 * (ld.density[i] + ld.density[i + 1]);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));

    for (double v : ld.density) CHECK(v > 0.0);
    std::size_t last = arc.size() - 1;
    for (std::size_t i : {std::size_t(0), arc.size() / 3, arc.size() / 2}) {
        double ratio = ld.density[i] / ld.density[last];
        double direct = delta_product(m, TorusPoint(arc.vertex[i]), TorusPoint(arc.vertex[last]));
        CHECK(std::abs(ratio / direct - 1.0) < 1e-10);
    }
}

TEST_CASE("linear leaf densities are uniform") {
    AnosovMap map(reference_matrix(), PerturbationField{});
    ConeCertificate cert = desk_certificate(map);
    DeltaMachine m = make_delta_machine(map, Tag::uu, cert);
    LeafSegment arc = sampling_arc(map, Tag::uu, kBase, 0.25);
    LeafDensity ld = leaf_density(m, arc);
    for (double v : ld.density) CHECK(v == doctest::Approx(1.0 / arc.length()).epsilon(1e-12));
}

TEST_CASE("leaf densities do not depend on the reference vertex") {
    AnosovMap map(reference_matrix(), single_mode(0.05));
    ConeCertificate cert = desk_certificate(map);
    DeltaMachine m = make_delta_machine(map, Tag::uu, cert);
    LeafSegment arc = sampling_arc(map, Tag::uu, kBase, 0.2);
    LeafDensity a = leaf_density(m, arc);
    LeafDensity b = leaf_density(m, rebase(arc, arc.size() / 4));
    REQUIRE(a.density.size() == b.density.size());
    for (std::size_t i = 0; i < a.density.size(); i += 7)
        CHECK(a.density[i] == doctest::Approx(b.density[i]).epsilon(1e-7));
}

TEST_CASE("delta guards reject what they cannot certify") {
    AnosovMap map(reference_matrix(), single_mode(0.05));
    ConeCertificate cert = desk_certificate(map);

    ConeCertificate weak = cert;
    weak.center_expansion_min = 0.98;
    CHECK_THROWS_AS(make_delta_machine(map, Tag::wu, weak), TailBoundUnavailable);

    DeltaOptions tight;
    tight.tol = 1e-300;
    CHECK_THROWS_AS(make_delta_machine(map, Tag::uu, cert, tight), NonConvergence);

    DeltaOptions bad;
    bad.safety = 0.5;
    CHECK_THROWS_AS(make_delta_machine(map, Tag::uu, cert, bad), ConfigError);

    DeltaMachine m = make_delta_machine(map, Tag::uu, cert);
    LeafSegment wide = sampling_arc(map, Tag::uu, kBase, 0.6);
    CHECK(wide.length() > m.opt.chart);
    CHECK_THROWS_AS(leaf_density(m, wide), ConfigError);

    LeafSegment s_arc = sampling_arc(map, Tag::s, kBase, 0.1);
    CHECK_THROWS_AS(leaf_density(m, s_arc), ConfigError);
}

TEST_CASE("pushforward measures carry unit weight and reproducible samples") {
    AnosovMap map(reference_matrix(), PerturbationField{});
    LeafSegment seed = grow_leaf(map, Tag::uu, kBase, 0.5);
    EmpiricalMeasure mu = ac_invariant_measure(map, Tag::uu, seed, 64, 8192, 7777);

    REQUIRE(mu.sample.size() == 8192);
    REQUIRE(mu.weight.size() == 8192);
    double total = 0.0;
    for (double w : mu.weight) {
        CHECK(w > 0.0);
        total += w;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mu.wave.size() == 13);

    EmpiricalMeasure again = ac_invariant_measure(map, Tag::uu, seed, 64, 8192, 7777);
    CHECK(again.invariance_defect == mu.invariance_defect);
    CHECK(again.sample[17].r.x == mu.sample[17].r.x);
    EmpiricalMeasure other = ac_invariant_measure(map, Tag::uu, seed, 64, 8192, 7778);
    CHECK(other.sample[17].r.x != mu.sample[17].r.x);

    CHECK(mu.cos_moment(1, 0, 0) == mu.cos_moment(-1, 0, 0));
    CHECK(mu.sin_moment(-1, 0, 0) == -mu.sin_moment(1, 0, 0));
    CHECK_THROWS_AS(mu.cos_moment(2, 0, 0), ConfigError);

    CHECK_THROWS_AS(ac_invariant_measure(map, Tag::uu, seed, 0, 64, 1), ConfigError);
    CHECK_THROWS_AS(ac_invariant_measure(map, Tag::uu, seed, 64, 0, 1), ConfigError);
    CHECK_THROWS_AS(ac_invariant_measure(map, Tag::wu, seed, 64, 64, 1), ConfigError);
}

TEST_CASE("pushforward measures equidistribute toward volume") {
    AnosovMap map(reference_matrix(), PerturbationField{});
    LeafSegment seed = grow_leaf(map, Tag::uu, kBase, 0.5);
    EmpiricalMeasure mu = ac_invariant_measure(map, Tag::uu, seed, 64, 8192, 7777);
    // Any nonzero stored mode of volume itself vanishes; the empirical
    // moments carry sampling noise plus a shallow-depth bias, both under
    // the equidistribution budget at this depth.
    CHECK(worst_moment(mu) < 3.0 / std::sqrt(8192.0));
}

TEST_CASE("pushforward measures reach every coarse cube") {
    AnosovMap map(reference_matrix(), PerturbationField{});
    LeafSegment seed = grow_leaf(map, Tag::uu, kBase, 0.5);
    EmpiricalMeasure mu = ac_invariant_measure(map, Tag::uu, seed, 64, 100000, 99);
    std::set<int> cubes;
    for (const TorusPoint& p : mu.sample) {
        int cx = int(p.r.x * 8), cy = int(p.r.y * 8), cz = int(p.r.z * 8);
        cubes.insert((cx * 8 + cy) * 8 + cz);
    }
    CHECK(cubes.size() == 512);
}

TEST_CASE("invariance defect shrinks as the averaging depth grows") {
    AnosovMap map(reference_matrix(), volume_preserving_mode(0.05));
    LeafSegment seed = grow_leaf(map, Tag::uu, kBase, 0.5);
    double d6 = ac_invariant_measure(map, Tag::uu, seed, 6, 16384, 7777).invariance_defect;
    double d12 = ac_invariant_measure(map, Tag::uu, seed, 12, 16384, 7777).invariance_defect;
    double d24 = ac_invariant_measure(map, Tag::uu, seed, 24, 16384, 7777).invariance_defect;
    CHECK(d6 > d12);
    CHECK(d12 > d24);
    CHECK(d24 < 0.55 * d6);

    LeafSegment sseed = grow_leaf(map, Tag::s, kBase, 0.5);
    EmpiricalMeasure mus = ac_invariant_measure(map, Tag::s, sseed, 48, 4096, 31);
    CHECK(mus.invariance_defect < 0.1);
    for (const TorusPoint& p : mus.sample) {
        CHECK(p.r.x >= 0.0);
        CHECK(p.r.x < 1.0);
    }
}

TEST_CASE("lebesgue exponents of the linear map are the eigen-logs") {
    AnosovMap map(reference_matrix(), PerturbationField{});
    for (Tag tag : {Tag::uu, Tag::wu, Tag::s}) {
        LeafSegment seed = grow_leaf(map, tag, kBase, 0.5);
        EmpiricalMeasure mu = ac_invariant_measure(map, tag, seed, 64, 2048, 11);
        LyapunovEstimate e = lebesgue_exponent(map, tag, mu);
        double target = (tag == Tag::s) ? -map.spectrum().log_of(tag) : map.spectrum().log_of(tag);
        CHECK(std::abs(e.value - target) < 1e-14);
        CHECK(e.std_error < 1e-14);
    }
}

TEST_CASE("lebesgue exponent matches a birkhoff run seeded from the measure") {
    AnosovMap map(reference_matrix(), volume_preserving_mode(0.05));
    LeafSegment seed = grow_leaf(map, Tag::uu, kBase, 0.5);
    EmpiricalMeasure mu = ac_invariant_measure(map, Tag::uu, seed, 64, 8192, 11);
    LyapunovEstimate leb = lebesgue_exponent(map, Tag::uu, mu);
    PointSampler from_mu = [&mu](std::uint64_t, std::uint64_t i) {
        return mu.sample[std::size_t(i) % mu.sample.size()];
    };
    LyapunovEstimate birk = lyapunov_exponent(map, Tag::uu, from_mu, 600, 12, 5);
    CHECK(std::abs(birk.value - leb.value) < 2.0 * (birk.std_error + leb.std_error));

    CHECK_THROWS_AS(lebesgue_exponent(map, Tag::wu, mu), ConfigError);
}

TEST_CASE("exponent never beats growth and matches it for clean families") {
    AnosovMap lin(reference_matrix(), PerturbationField{});
    std::vector<TorusPoint> bases = {kBase, TorusPoint(Vec3{0.7, 0.2, 0.9})};
    for (Tag tag : {Tag::uu, Tag::wu, Tag::s}) {
        LeafSegment seed = grow_leaf(lin, tag, kBase, 0.5);
        EmpiricalMeasure mu = ac_invariant_measure(lin, tag, seed, 64, 2048, 11);
        SaghinXiaCheck c = saghin_xia_check(lin, tag, mu, bases);
        CHECK(std::abs(c.slack) < 1e-9);
        // Growth is measured in the expanding view, so the s oracle is
        // the negated eigen-log.
        double target = (tag == Tag::s) ? -lin.spectrum().log_of(tag) : lin.spectrum().log_of(tag);
        CHECK(c.chi.mean == doctest::Approx(target).epsilon(1e-10));
    }

    GrowthOptions gopt;
    gopt.stages = 14;
    gopt.window = 6;
    std::vector<TorusPoint> more = {kBase, TorusPoint(Vec3{0.7, 0.2, 0.9}),
                                    TorusPoint(Vec3{0.35, 0.81, 0.12})};

    AnosovMap vp(reference_matrix(), volume_preserving_mode(0.05));
    LeafSegment vseed = grow_leaf(vp, Tag::wu, kBase, 0.5);
    EmpiricalMeasure vmu = ac_invariant_measure(vp, Tag::wu, vseed, 128, 8192, 11);
    SaghinXiaCheck cv = saghin_xia_check(vp, Tag::wu, vmu, more, gopt);
    CHECK(cv.slack > -5e-3);
    CHECK(std::abs(cv.slack) < 1e-2);
    CHECK(cv.sigma > 0.0);

    AnosovMap p08(reference_matrix(), single_mode(0.08));
    LeafSegment pseed = grow_leaf(p08, Tag::wu, kBase, 0.5);
    EmpiricalMeasure pmu = ac_invariant_measure(p08, Tag::wu, pseed, 128, 8192, 11);
    SaghinXiaCheck cp = saghin_xia_check(p08, Tag::wu, pmu, more, gopt);
    CHECK(cp.slack > -5e-3);

    CHECK_THROWS_AS(saghin_xia_check(lin, Tag::uu, vmu, {}), ConfigError);
}

TEST_CASE("conditional entropy tracks the exponent along expanding leaves") {
    AnosovMap lin(reference_matrix(), PerturbationField{});
    ConeCertificate cl = desk_certificate(lin);

    ConditionalEntropyOptions opt;
    opt.samples = 24;
    opt.depth = 9;
    LeafSegment seed = grow_leaf(lin, Tag::uu, kBase, 0.5);
    EmpiricalMeasure mu = ac_invariant_measure(lin, Tag::uu, seed, 128, 2048, 11);
    ConditionalEntropyEstimate est = conditional_entropy(lin, Tag::uu, cl, mu, opt);
    CHECK(est.value > 0.0);
    CHECK(std::abs(est.value - lin.spectrum().log_of(Tag::uu)) < 0.05);
    CHECK(est.violation_fraction == 0.0);
    REQUIRE(est.mean_neglog.size() == std::size_t(opt.depth) + 1);
    CHECK(est.mean_neglog[0] == 0.0);
    for (std::size_t k = 1; k < est.mean_neglog.size(); ++k)
        CHECK(est.mean_neglog[k] >= est.mean_neglog[k - 1] - 1e-12);

    ConditionalEntropyOptions opts;
    opts.samples = 16;
    opts.depth = 7;
    LeafSegment sseed = grow_leaf(lin, Tag::s, kBase, 0.5);
    EmpiricalMeasure smu = ac_invariant_measure(lin, Tag::s, sseed, 256, 1024, 11);
    ConditionalEntropyEstimate sest = conditional_entropy(lin, Tag::s, cl, smu, opts);
    CHECK(std::abs(sest.value + lin.spectrum().log_of(Tag::s)) < 0.05);
}

TEST_CASE("conditional entropy equals the lebesgue exponent off the linear family") {
    AnosovMap vp(reference_matrix(), volume_preserving_mode(0.05));
    ConeCertificate cert = desk_certificate(vp);
    LeafSegment seed = grow_leaf(vp, Tag::uu, kBase, 0.5);
    EmpiricalMeasure mu = ac_invariant_measure(vp, Tag::uu, seed, 256, 2048, 11);
    LyapunovEstimate leb = lebesgue_exponent(vp, Tag::uu, mu);

    ConditionalEntropyOptions opt;
    opt.samples = 24;
    opt.depth = 9;
    ConditionalEntropyEstimate est = conditional_entropy(vp, Tag::uu, cert, mu, opt);
    CHECK(std::abs(est.value - leb.value) < 0.05);
    CHECK(est.violation_fraction == 0.0);
}

TEST_CASE("conditional entropy rejects unusable configurations") {
    AnosovMap lin(reference_matrix(), PerturbationField{});
    ConeCertificate cert = desk_certificate(lin);
    LeafSegment seed = grow_leaf(lin, Tag::uu, kBase, 0.5);
    EmpiricalMeasure mu = ac_invariant_measure(lin, Tag::uu, seed, 64, 256, 11);

    ConditionalEntropyOptions bad;
    bad.depth = 1;
    CHECK_THROWS_AS(conditional_entropy(lin, Tag::uu, cert, mu, bad), ConfigError);

    ConditionalEntropyOptions hungry;
    hungry.samples = 512;
    CHECK_THROWS_AS(conditional_entropy(lin, Tag::uu, cert, mu, hungry), ConfigError);

    LeafSegment sseed = grow_leaf(lin, Tag::s, kBase, 0.5);
    EmpiricalMeasure smu = ac_invariant_measure(lin, Tag::s, sseed, 64, 256, 11);
    CHECK_THROWS_AS(conditional_entropy(lin, Tag::uu, cert, smu, {}), ConfigError);

    ConditionalEntropyOptions blind;
    blind.samples = 24;
    blind.radius = 0.01;
    CHECK_THROWS_AS(conditional_entropy(lin, Tag::uu, cert, mu, blind), ResolutionTooCoarse);
}
