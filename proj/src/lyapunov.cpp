#include "anosov/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "anosov/errors.hpp"
#include "anosov/util.hpp"

namespace anosov {

PointSampler uniform_volume_sampler() {
    return [](std::uint64_t seed, std::uint64_t index) {
        std::mt19937_64 rng(derive_seed(seed, index));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        double a = u(rng), b = u(rng), c = u(rng);
        return TorusPoint(a, b, c);
    };
}

namespace {

double orbit_mean_uu(const AnosovMap& map, TorusPoint x, int n) {
    Vec3 e = leaf_direction(map, Tag::uu, x);
    KahanSum acc;
    for (int k = 0; k < n; ++k) {
        Vec3 w = map.jacobian(x) * e;
        double g = norm(w);
        acc.add(std::log(g));
        e = w / g;
        x = map.apply(x);
    }
    return acc.value() / double(n);
}

double orbit_mean_wu(const AnosovMap& map, TorusPoint x, int n) {
    Vec3 u = leaf_direction(map, Tag::uu, x);
    Vec3 v = leaf_direction(map, Tag::wu, x);
    v = normalized(v - u * dot(v, u));
    KahanSum acc;
    for (int k = 0; k < n; ++k) {
        Mat3 d = map.jacobian(x);
        Vec3 du = d * u, dv = d * v;
        double r11 = norm(du);
        u = du / r11;
        Vec3 dv_perp = dv - u * dot(dv, u);
        double r22 = norm(dv_perp);
        if (r22 < 1e-300) throw PlaneDegeneracy("wu exponent: frame collapsed");
        v = dv_perp / r22;
        acc.add(std::log(r22));
        x = map.apply(x);
    }
    return acc.value() / double(n);
}

double orbit_mean_s(const AnosovMap& map, TorusPoint x, int n) {
    Vec3 e = leaf_direction(map, Tag::s, x);
    KahanSum acc;
    for (int k = 0; k < n; ++k) {
        TorusPoint y = map.inverse_apply(x);
        Vec3 w = solve(map.jacobian(y), e);
        double g = norm(w);  // growth under f^{-1}; the f exponent is -log g
        acc.add(std::log(g));
        e = w / g;
        x = y;
    }
    return -acc.value() / double(n);
}

}  // namespace

LyapunovEstimate lyapunov_exponent(const AnosovMap& map, Tag tag, const PointSampler& sampler,
                                   int n, int ensemble, std::uint64_t seed, int threads) {
    if (n < 1 || ensemble < 1) throw Error("lyapunov_exponent: n and ensemble must be positive");
    std::vector<double> means(static_cast<std::size_t>(ensemble), 0.0);
    parallel_for(std::size_t(ensemble), threads, [&](std::size_t i) {
        TorusPoint x0 = sampler(seed, i);
        switch (tag) {
            case Tag::uu: means[i] = orbit_mean_uu(map, x0, n); break;
            case Tag::wu: means[i] = orbit_mean_wu(map, x0, n); break;
            default: means[i] = orbit_mean_s(map, x0, n); break;
        }
    });

    KahanSum total;
    for (double m : means) total.add(m);
    double mean = total.value() / double(ensemble);
    double var = 0.0;
    for (double m : means) var += (m - mean) * (m - mean);

    LyapunovEstimate est;
    est.tag = tag;
    est.value = mean;
    est.std_error = ensemble > 1 ? std::sqrt(var / double(ensemble - 1) / double(ensemble)) : 0.0;
    est.n = n;
    est.ensemble = ensemble;
    est.seed = seed;
    return est;
}

OseledetsEstimate oseledets_qr(const AnosovMap& map, const TorusPoint& x, int n) {
    if (n < 1) throw Error("oseledets_qr: n must be positive");
    Vec3 q[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    KahanSum diag[3];
    KahanSum det_acc;
    TorusPoint y = x;
    for (int k = 0; k < n; ++k) {
        Mat3 d = map.jacobian(y);
        det_acc.add(std::log(std::abs(det(d))));
        Vec3 b[3] = {d * q[0], d * q[1], d * q[2]};
        for (int i = 0; i < 3; ++i) {
            // Modified Gram-Schmidt with one re-orthogonalization pass to
            // keep the frame orthonormal over long orbits.
            for (int pass = 0; pass < 2; ++pass)
                for (int j = 0; j < i; ++j) b[i] -= q[j] * dot(b[i], q[j]);
            double r = norm(b[i]);
            if (r < 1e-300) throw PlaneDegeneracy("oseledets_qr: frame collapsed");
            diag[i].add(std::log(r));
            q[i] = b[i] / r;
        }
        y = map.apply(y);
    }
    OseledetsEstimate est;
    for (int i = 0; i < 3; ++i) est.exponents[std::size_t(i)] = diag[i].value() / double(n);
    double total = diag[0].value() + diag[1].value() + diag[2].value();
    est.det_defect = std::abs(total - det_acc.value());
    est.n = n;
    std::sort(est.exponents.begin(), est.exponents.end(), std::greater<double>());
    return est;
}

}  // namespace anosov
