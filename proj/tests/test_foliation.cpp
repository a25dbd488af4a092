#include <cmath>
#include <random>

#include "doctest.h"
#include "support/fixtures.hpp"

#include "anosov/errors.hpp"
#include "anosov/growth.hpp"
#include "anosov/leaf.hpp"
#include "anosov/map.hpp"

using namespace anosov;
using namespace anosov::fixtures;

namespace {

std::mt19937_64 rng(4460913ULL);

TorusPoint random_point() {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return TorusPoint(u(rng), u(rng), u(rng));
}

double off_line_distance(const Vec3& p, const Vec3& through, const Vec3& axis) {
    Vec3 d = p - through;
    return norm(d - axis * dot(d, axis));
}

}  // namespace

TEST_CASE("grown leaves of the linear map are straight eigensegments") {
    AnosovMap map(reference_matrix(), PerturbationField{});
    const Spectrum& sp = map.spectrum();
    TorusPoint x(0.37, 0.61, 0.09);
    for (Tag t : {Tag::uu, Tag::wu, Tag::s}) {
        LeafSegment seg = grow_leaf(map, t, x, 0.3);
        CHECK(seg.tag == t);
        CHECK(seg.backward == (t == Tag::s));
        CHECK(seg.length() == doctest::Approx(0.6).epsilon(1e-9));
        CHECK(seg.param.front() == doctest::Approx(-0.3).epsilon(1e-12));
        CHECK(seg.param.back() == doctest::Approx(0.3).epsilon(1e-12));

        Vec3 axis = sp.dir(t);
        for (std::size_t i = 0; i < seg.size(); i += 25)
            CHECK(off_line_distance(seg.vertex[i], x.r, axis) < 1e-9);

        // Positive parameters run along the oriented eigendirection.
        Vec3 probe = seg.at_arclength(0.45).lift;
        CHECK(norm(probe - (x.r + axis * 0.15)) < 1e-9);
        CHECK(seg.at_arclength(0.45).param == doctest::Approx(0.15).epsilon(1e-6));
        CHECK(norm(seg.at_param(0.0) - x.r) < 1e-12);
    }
}

TEST_CASE("iteration stretches linear segments by exactly the eigenvalue modulus") {
    AnosovMap map(reference_matrix(), PerturbationField{});
    const Spectrum& sp = map.spectrum();
    TorusPoint x(0.52, 0.18, 0.83);
    for (Tag t : {Tag::uu, Tag::wu, Tag::s}) {
        LeafSegment seg = grow_leaf(map, t, x, 0.2);
        double l0 = seg.length();
        double rate = MapView(map, seg.backward).leaf_rate(t);
        CHECK(rate > 1.0);
        for (int k = 1; k <= 4; ++k) {
            seg = iterate_leaf(map, seg);
            CHECK(seg.stage == k);
            CHECK(seg.length() == doctest::Approx(l0 * std::pow(rate, k)).epsilon(1e-11));
            CHECK(seg.param.front() == doctest::Approx(-0.2).epsilon(1e-12));
            CHECK(seg.param.back() == doctest::Approx(0.2).epsilon(1e-12));
        }
        // The iterated segment is still a straight eigensegment.
        Vec3 mid = seg.at_param(0.0);
        for (std::size_t i = 0; i < seg.size(); i += 40)
            CHECK(off_line_distance(seg.vertex[i], mid, sp.dir(t)) < 1e-8 * seg.length());
    }
    CHECK(MapView(map, true).leaf_rate(Tag::s) == doctest::Approx(5.0489173395223053).epsilon(1e-13));
}

TEST_CASE("refined iterates track the true leaf of a perturbed map") {
    AnosovMap map(reference_matrix(), single_mode(0.05));
    TorusPoint x = random_point();

    for (Tag t : {Tag::uu, Tag::s}) {
        MapView view(map, t == Tag::s);
        LeafSegment seg = grow_leaf(map, t, x, 0.1);
        std::vector<LeafSegment> stage{seg};
        for (int k = 0; k < 4; ++k) stage.push_back(iterate_leaf(map, stage.back()));

        for (std::size_t k = 0; k + 1 < stage.size(); ++k) {
            const LeafSegment& cur = stage[k];
            const LeafSegment& nxt = stage[k + 1];
            // Monotone tables.
            for (std::size_t i = 1; i < cur.size(); ++i) {
                CHECK(cur.param[i] > cur.param[i - 1]);
                CHECK(cur.cumlen[i] > cur.cumlen[i - 1]);
            }
            // A sampled leaf point maps onto the next stage at the same
            // root parameter, up to the interpolation budget.
            for (double frac : {0.13, 0.41, 0.77}) {
                LeafPoint p = cur.at_arclength(frac * cur.length());
                Vec3 mapped = view.lift_apply(p.lift);
                CHECK(norm(mapped - nxt.at_param(p.param)) < 2e-4);
            }
        }

        // Chords align with the leaf field at interior vertices.
        const LeafSegment& deep = stage.back();
        for (std::size_t i = deep.size() / 7; i + 1 < deep.size(); i += deep.size() / 7) {
            Vec3 chord = deep.vertex[i + 1] - deep.vertex[i - 1];
            Vec3 e = leaf_direction(map, t, TorusPoint(deep.vertex[i]));
            CHECK(line_angle(chord, e) < 5e-3);
        }
    }
}

TEST_CASE("refinement thresholds do not move the measured lengths") {
    AnosovMap map(reference_matrix(), single_mode(0.05));
    LeafSegment root = grow_leaf(map, Tag::uu, TorusPoint(0.21, 0.88, 0.44), 0.1);

    RefineOptions loose;
    RefineOptions tight;
    tight.max_sag = 1e-11;
    tight.sag_ratio = 2e-5;
    tight.max_chord = 0.02;

    LeafSegment a = root, b = root;
    for (int k = 0; k < 4; ++k) {
        a = iterate_leaf(map, a, loose);
        b = iterate_leaf(map, b, tight);
    }
    CHECK(b.size() > a.size());
    CHECK(a.length() == doctest::Approx(b.length()).epsilon(1e-5));
}

TEST_CASE("vertex budget aborts runaway refinement") {
    AnosovMap map(reference_matrix(), single_mode(0.05));
    LeafSegment root = grow_leaf(map, Tag::uu, TorusPoint(0.5, 0.25, 0.75), 0.1);
    RefineOptions opt;
    opt.vertex_budget = 64;
    LeafSegment seg = root;
    CHECK_THROWS_AS(
        {
            for (int k = 0; k < 6; ++k) seg = iterate_leaf(map, seg, opt);
        },
        VertexBudgetExceeded);
}

TEST_CASE("growth exponents of the linear map equal the log moduli") {
    AnosovMap map(reference_matrix(), PerturbationField{});
    GrowthOptions opt;
    opt.radius = 0.2;
    opt.stages = 5;
    opt.window = 3;
    TorusPoint x(0.11, 0.71, 0.39);

    GrowthSeries uu = geometric_growth(map, Tag::uu, x, opt);
    CHECK(uu.chi == doctest::Approx(1.1777252115233595).epsilon(1e-10));
    CHECK(uu.chi_stderr < 1e-10);

    GrowthSeries wu = geometric_growth(map, Tag::wu, x, opt);
    CHECK(wu.chi == doctest::Approx(0.44144862056606596).epsilon(1e-10));

    GrowthSeries s = geometric_growth(map, Tag::s, x, opt);
    CHECK(s.chi == doctest::Approx(1.6191738320894254).epsilon(1e-10));

    CHECK(uu.length.size() == 6);
    for (std::size_t k = 1; k < uu.length.size(); ++k) CHECK(uu.length[k] > uu.length[k - 1]);
}

TEST_CASE("growth exponent is radius-independent for a perturbed map") {
    AnosovMap map(reference_matrix(), single_mode(0.05));
    TorusPoint x = random_point();
    GrowthOptions small_r, large_r;
    small_r.radius = 0.08;
    large_r.radius = 0.2;
    small_r.stages = large_r.stages = 6;
    small_r.window = large_r.window = 3;

    GrowthSeries a = geometric_growth(map, Tag::uu, x, small_r);
    GrowthSeries b = geometric_growth(map, Tag::uu, x, large_r);
    CHECK(a.chi == doctest::Approx(b.chi).epsilon(5e-3));
    CHECK(std::abs(a.chi - 1.1777252115233595) < 0.05);
    CHECK(a.chi_stderr < 5e-3);

    GrowthSeries w = geometric_growth(map, Tag::wu, x, large_r);
    CHECK(std::abs(w.chi - 0.44144862056606596) < 0.05);

    std::vector<TorusPoint> bases{random_point(), random_point(), random_point()};
    ChiEstimate chi = chi_sup(map, Tag::uu, bases, small_r);
    CHECK(chi.per_base.size() == 3);
    CHECK(chi.sup >= chi.mean);
    for (const GrowthSeries& g : chi.per_base) CHECK(chi.sup >= g.chi);
}
