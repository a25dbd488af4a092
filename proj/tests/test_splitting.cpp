#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "support/fixtures.hpp"

#include "anosov/bundles.hpp"
#include "anosov/cones.hpp"
#include "anosov/errors.hpp"
#include "anosov/lyapunov.hpp"
#include "anosov/map.hpp"

using namespace anosov;
using namespace anosov::fixtures;

namespace {

std::mt19937_64 rng(911702ULL);

TorusPoint random_point() {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return TorusPoint(u(rng), u(rng), u(rng));
}

ConeRequest small_request(double theta, int grid_n, int samples) {
    ConeRequest r;
    r.theta_plane = r.theta_uu = r.theta_center = r.theta_s = theta;
    r.grid_n = grid_n;
    r.boundary_samples = samples;
    return r;
}

}  // namespace

TEST_CASE("zero-angle certificate of the linear map reproduces the eigenvalue moduli") {
    AnosovMap map(reference_matrix(), PerturbationField{});
    ConeCertificate cert = verify_cone_condition(map, small_request(0.0, 3, 360));

    // Line cones of angle zero see exactly the eigendirections.
    CHECK(cert.uu_expansion_min == doctest::Approx(3.2469796037174671).epsilon(1e-13));
    CHECK(cert.uu_expansion_max == doctest::Approx(cert.uu_expansion_min).epsilon(1e-14));
    CHECK(cert.center_expansion_min == doctest::Approx(1.5549581320873712).epsilon(1e-13));
    CHECK(cert.contraction() == doctest::Approx(5.0489173395223053).epsilon(1e-13));

    // The plane band is sampled on a finite circle, so its minimum only
    // brackets the middle modulus from above.
    CHECK(cert.plane_expansion_min >= 1.5549581320873712 - 1e-12);
    CHECK(cert.plane_expansion_min <= 1.5549581320873712 * (1.0 + 1e-3));

    // Domination constants reduce to eigenvalue ratios.
    CHECK(cert.gamma_forward == doctest::Approx(0.47889371719708358).epsilon(1e-13));
    CHECK(cert.gamma_backward == doctest::Approx(0.12737466051853342).epsilon(1e-13));
    CHECK(cert.gamma == doctest::Approx(map.spectrum().dominated_ratio()).epsilon(1e-13));
    CHECK(cert.gamma < 1.0);

    CHECK(cert.leaf_expansion_min(Tag::uu) == cert.uu_expansion_min);
    CHECK(cert.leaf_expansion_min(Tag::wu) == cert.center_expansion_min);
    CHECK(cert.leaf_expansion_min(Tag::s) == cert.s_inv_expansion_min);
}

TEST_CASE("certificate admits a small perturbation with positive margins") {
    AnosovMap map(reference_matrix(), single_mode(0.05));
    ConeCertificate cert = verify_cone_condition(map, small_request(0.3, 12, 240));

    CHECK(cert.plane_angle_margin > 0.0);
    CHECK(cert.uu_angle_margin > 0.0);
    CHECK(cert.s_angle_margin > 0.0);
    CHECK(cert.gamma < 1.0);
    CHECK(cert.expansion() > 1.0);
    CHECK(cert.contraction() > 1.0);

    // One-step factors straddle the unperturbed moduli.
    const Spectrum& sp = map.spectrum();
    CHECK(cert.uu_expansion_min < std::abs(sp.alpha_of(Tag::uu)));
    CHECK(cert.uu_expansion_max > std::abs(sp.alpha_of(Tag::uu)));
    CHECK(cert.center_expansion_min < std::abs(sp.alpha_of(Tag::wu)));
    CHECK(cert.center_expansion_max > std::abs(sp.alpha_of(Tag::wu)));
    CHECK(cert.s_inv_expansion_min < 1.0 / std::abs(sp.alpha_of(Tag::s)));
    CHECK(cert.s_inv_expansion_max > 1.0 / std::abs(sp.alpha_of(Tag::s)));

    // Refining the lattice can only widen the observed ranges (the
    // coarse lattice is a subset of the fine one).
    ConeCertificate coarse = verify_cone_condition(map, small_request(0.3, 6, 240));
    CHECK(cert.uu_expansion_min <= coarse.uu_expansion_min + 1e-15);
    CHECK(cert.uu_expansion_max >= coarse.uu_expansion_max - 1e-15);
    CHECK(cert.gamma >= coarse.gamma - 1e-15);
}

TEST_CASE("certificate rejects a perturbation that breaks the cone system") {
    AnosovMap map(reference_matrix(), single_mode(0.9));
    CHECK_THROWS_AS(verify_cone_condition(map, small_request(0.3, 6, 120)), ConeViolation);
}

TEST_CASE("bundle directions of the linear map are the eigendirections") {
    AnosovMap map(reference_matrix(), PerturbationField{});
    const Spectrum& sp = map.spectrum();
    for (int trial = 0; trial < 5; ++trial) {
        TorusPoint x = random_point();

        BundleSample uu = strong_unstable_direction(map, x, 8);
        CHECK(line_angle(uu.direction, sp.dir(Tag::uu)) < 1e-12);
        CHECK(uu.equivariance_residual < 1e-12);
        CHECK(dot(uu.direction, sp.dir(Tag::uu)) > 0.0);

        BundleSample s = stable_direction(map, x, 8);
        CHECK(line_angle(s.direction, sp.dir(Tag::s)) < 1e-12);
        CHECK(s.equivariance_residual < 1e-12);

        BundleSample wu = weak_unstable_direction(map, x, 6, 8);
        CHECK(line_angle(wu.direction, sp.dir(Tag::wu)) < 1e-11);
        CHECK(wu.equivariance_residual < 1e-11);

        PlaneSample pl = unstable_plane(map, x, 6);
        Vec3 normal = cross(sp.dir(Tag::uu), sp.dir(Tag::wu));
        CHECK(line_angle(cross(pl.u1, pl.u2), normal) < 1e-10);

        for (Tag t : {Tag::uu, Tag::wu, Tag::s})
            CHECK(line_angle(leaf_direction(map, t, x), sp.dir(t)) < 1e-10);
    }
}

TEST_CASE("perturbed bundle fields are equivariant, cone-bound and O(eps) tilted") {
    AnosovMap map(reference_matrix(), single_mode(0.05));
    const Spectrum& sp = map.spectrum();

    for (int trial = 0; trial < 8; ++trial) {
        TorusPoint x = random_point();

        BundleSample uu = strong_unstable_direction(map, x, 50);
        BundleSample s = stable_direction(map, x, 24);
        BundleSample wu = weak_unstable_direction(map, x, 24, 50);
        CHECK(uu.equivariance_residual < 1e-10);
        CHECK(s.equivariance_residual < 1e-10);
        CHECK(wu.equivariance_residual < 1e-9);

        // Stay inside the certified cones around the linear axes.
        CHECK(line_angle(uu.direction, sp.dir(Tag::uu)) < 0.25);
        CHECK(line_angle(wu.direction, sp.dir(Tag::wu)) < 0.25);
        CHECK(line_angle(s.direction, sp.dir(Tag::s)) < 0.25);

        // The weak direction lies in the unstable plane at the same point.
        PlaneSample pl = unstable_plane(map, x, 24);
        CHECK(std::abs(dot(wu.direction, cross(pl.u1, pl.u2))) < 1e-8);

        // The three fields stay uniformly transverse.
        Mat3 frame;
        for (int i = 0; i < 3; ++i) {
            frame.m[i][0] = uu.direction[i];
            frame.m[i][1] = wu.direction[i];
            frame.m[i][2] = s.direction[i];
        }
        CHECK(std::abs(det(frame)) > 0.05);

        // Equivariance of the automatic-depth field.  The strong field is
        // pinned to the backward-orbit shadowing floor near 1e-8; the
        // other two reach machine precision.
        for (Tag t : {Tag::uu, Tag::wu, Tag::s}) {
            Vec3 here = leaf_direction(map, t, x);
            Vec3 ahead = leaf_direction(map, t, map.apply(x));
            double cap = t == Tag::uu ? 1e-7 : 1e-12;
            CHECK(line_angle(map.jacobian(x) * here, ahead) < cap);
        }
    }

    // Tilt away from the linear axis scales linearly with the amplitude.
    AnosovMap big(reference_matrix(), single_mode(0.04));
    AnosovMap small(reference_matrix(), single_mode(0.004));
    double tilt_big = 0.0, tilt_small = 0.0;
    for (int trial = 0; trial < 6; ++trial) {
        TorusPoint x = random_point();
        tilt_big = std::max(tilt_big,
                            line_angle(leaf_direction(big, Tag::uu, x), sp.dir(Tag::uu)));
        tilt_small = std::max(tilt_small,
                              line_angle(leaf_direction(small, Tag::uu, x), sp.dir(Tag::uu)));
    }
    CHECK(tilt_big > 1e-4);
    CHECK(tilt_small < 0.3 * tilt_big);
}

TEST_CASE("alignment error decays at the certified rate in the depth") {
    AnosovMap map(reference_matrix(), single_mode(0.05));
    TorusPoint x(0.31, 0.77, 0.12);
    Vec3 truth = strong_unstable_direction(map, x, 60).direction;
    double rate = map.spectrum().dominated_ratio();
    double prev = 1e300;
    for (int n : {6, 10, 14}) {
        double err = line_angle(strong_unstable_direction(map, x, n).direction, truth);
        CHECK(err < 5.0 * std::pow(rate, n) + 1e-13);
        CHECK(err <= prev + 1e-12);
        prev = err;
    }
    CHECK(depth_for_rate(rate, BundleOptions{}) >= 14);
}

TEST_CASE("lyapunov exponents of the linear map equal the log moduli") {
    AnosovMap map(reference_matrix(), PerturbationField{});
    const Spectrum& sp = map.spectrum();
    for (Tag t : {Tag::uu, Tag::wu, Tag::s}) {
        LyapunovEstimate est = lyapunov_exponent(map, t, uniform_volume_sampler(), 40, 3, 7);
        CHECK(est.value == doctest::Approx(sp.log_of(t)).epsilon(1e-12));
        CHECK(est.std_error < 1e-12);
        CHECK(est.n == 40);
        CHECK(est.ensemble == 3);
    }
    CHECK(lyapunov_exponent(map, Tag::s, uniform_volume_sampler(), 10, 2, 7).value < 0.0);

    // Ensembles are reproducible functions of the seed.
    LyapunovEstimate a = lyapunov_exponent(map, Tag::uu, uniform_volume_sampler(), 25, 4, 99);
    LyapunovEstimate b = lyapunov_exponent(map, Tag::uu, uniform_volume_sampler(), 25, 4, 99);
    CHECK(a.value == b.value);
}

TEST_CASE("QR cocycle matches the spectrum and keeps exact volume bookkeeping") {
    AnosovMap map(reference_matrix(), PerturbationField{});
    const Spectrum& sp = map.spectrum();
    OseledetsEstimate est = oseledets_qr(map, TorusPoint(0.21, 0.43, 0.68), 400);
    CHECK(est.det_defect < 1e-9);
    for (int i = 0; i < 3; ++i)
        CHECK(est.exponents[std::size_t(i)] ==
              doctest::Approx(sp.log_modulus[std::size_t(i)]).epsilon(2e-2));
    // Individual exponents carry an O(1/n) seeding transient, but their
    // sum telescopes to the exact volume growth.
    double sum = est.exponents[0] + est.exponents[1] + est.exponents[2];
    CHECK(std::abs(sum) < 1e-10);

    OseledetsEstimate fine = oseledets_qr(map, TorusPoint(0.21, 0.43, 0.68), 1600);
    CHECK(std::abs(fine.exponents[0] - sp.log_modulus[0]) <=
          std::abs(est.exponents[0] - sp.log_modulus[0]) + 1e-6);
}

TEST_CASE("volume-preserving family has zero exponent sum") {
    AnosovMap map(reference_matrix(), volume_preserving_mode(0.06));
    OseledetsEstimate est = oseledets_qr(map, TorusPoint(0.37, 0.15, 0.82), 600);
    CHECK(est.det_defect < 1e-9);
    CHECK(std::abs(est.exponents[0] + est.exponents[1] + est.exponents[2]) < 1e-10);

    // Per-tag ensemble means close the same identity statistically.
    double sum = 0.0;
    for (Tag t : {Tag::uu, Tag::wu, Tag::s})
        sum += lyapunov_exponent(map, t, uniform_volume_sampler(), 600, 8, 31).value;
    CHECK(std::abs(sum) < 0.015);
}

TEST_CASE("ensemble exponents respect the certified one-step bounds") {
    AnosovMap map(reference_matrix(), single_mode(0.05));
    ConeCertificate cert = verify_cone_condition(map, small_request(0.3, 8, 180));

    LyapunovEstimate uu = lyapunov_exponent(map, Tag::uu, uniform_volume_sampler(), 600, 8, 5);
    LyapunovEstimate wu = lyapunov_exponent(map, Tag::wu, uniform_volume_sampler(), 600, 8, 5);
    LyapunovEstimate s = lyapunov_exponent(map, Tag::s, uniform_volume_sampler(), 600, 8, 5);

    CHECK(uu.value > wu.value);
    CHECK(wu.value > 0.0);
    CHECK(s.value < 0.0);

    const double slack = 0.02;  // off-lattice jacobian variation
    CHECK(uu.value >= std::log(cert.leaf_expansion_min(Tag::uu)) - slack);
    CHECK(uu.value <= std::log(cert.leaf_expansion_max(Tag::uu)) + slack);
    CHECK(wu.value >= std::log(cert.leaf_expansion_min(Tag::wu)) - slack);
    CHECK(wu.value <= std::log(cert.leaf_expansion_max(Tag::wu)) + slack);
    CHECK(s.value <= -std::log(cert.leaf_expansion_min(Tag::s)) + slack);
    CHECK(s.value >= -std::log(cert.leaf_expansion_max(Tag::s)) - slack);

    // The QR estimate along one long orbit agrees with the ensembles.
    OseledetsEstimate qr = oseledets_qr(map, TorusPoint(0.45, 0.27, 0.66), 4000);
    CHECK(qr.exponents[0] == doctest::Approx(uu.value).epsilon(0.02));
    CHECK(qr.exponents[1] == doctest::Approx(wu.value).epsilon(0.05));
    CHECK(qr.exponents[2] == doctest::Approx(s.value).epsilon(0.02));
}
