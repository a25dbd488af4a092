#include "anosov/bundles.hpp"

#include <cmath>
#include <vector>

#include "anosov/errors.hpp"

namespace anosov {
namespace {

// Pushes a seed direction with the one-step derivatives along
// orbit[from] -> orbit[from+1] -> ... -> orbit[to] (indices into a
// forward-ordered orbit), normalizing at each step.
Vec3 push_direction(const AnosovMap& map, const std::vector<TorusPoint>& orbit,
                    std::size_t from, std::size_t to, Vec3 seed) {
    Vec3 v = normalized(seed);
    for (std::size_t i = from; i < to; ++i) v = normalized(map.jacobian(orbit[i]) * v);
    return v;
}

Vec3 orient(Vec3 v, const Vec3& reference) {
    return dot(v, reference) < 0.0 ? -v : v;
}

double line_residual(const AnosovMap& map, const TorusPoint& x, const Vec3& at_x,
                     const Vec3& at_fx) {
    return line_angle(map.jacobian(x) * at_x, at_fx);
}

}  // namespace

int depth_for_rate(double rate, const BundleOptions& opt) {
    if (!(rate > 0.0 && rate < 1.0)) throw Error("depth_for_rate: rate must be in (0,1)");
    int n = int(std::ceil(std::log(opt.tol) / std::log(rate))) + opt.extra_depth;
    return std::max(opt.min_depth, std::min(opt.max_depth, n));
}

BundleSample strong_unstable_direction(const AnosovMap& map, const TorusPoint& x, int n) {
    const Vec3 seed = map.spectrum().dir(Tag::uu);
    // orbit[i] = f^{i-n}(x); orbit[n] = x, plus one forward point for the
    // equivariance audit.
    std::vector<TorusPoint> orbit(std::size_t(n) + 2);
    orbit[std::size_t(n)] = x;
    for (int i = n - 1; i >= 0; --i) orbit[std::size_t(i)] = map.inverse_apply(orbit[std::size_t(i) + 1]);
    orbit[std::size_t(n) + 1] = map.apply(x);

    BundleSample out;
    out.base = x;
    out.tag = Tag::uu;
    out.depth = n;
    out.direction = orient(push_direction(map, orbit, 0, std::size_t(n), seed), seed);
    Vec3 at_fx = orient(push_direction(map, orbit, 1, std::size_t(n) + 1, seed), seed);
    out.equivariance_residual = line_residual(map, x, out.direction, at_fx);
    return out;
}

BundleSample stable_direction(const AnosovMap& map, const TorusPoint& x, int n) {
    const Vec3 seed = map.spectrum().dir(Tag::s);
    // Forward orbit; the seed is pulled back through the inverse
    // derivatives, under which the stable direction dominates.
    std::vector<TorusPoint> orbit(std::size_t(n) + 2);
    orbit[0] = x;
    for (int i = 1; i <= n + 1; ++i) orbit[std::size_t(i)] = map.apply(orbit[std::size_t(i) - 1]);

    auto pull = [&](std::size_t from, std::size_t to) {
        // from > to; steps use (Df at the lower point)^{-1}.
        Vec3 v = normalized(seed);
        for (std::size_t i = from; i > to; --i)
            v = normalized(solve(map.jacobian(orbit[i - 1]), v));
        return orient(v, seed);
    };

    BundleSample out;
    out.base = x;
    out.tag = Tag::s;
    out.depth = n;
    out.direction = pull(std::size_t(n), 0);
    Vec3 at_fx = pull(std::size_t(n) + 1, 1);
    out.equivariance_residual = line_residual(map, x, out.direction, at_fx);
    return out;
}

namespace {

struct PlaneSweep {
    // plane[i] = orthonormal pair at orbit[i], valid for i >= valid_from.
    std::vector<std::pair<Vec3, Vec3>> plane;
    std::size_t valid_from;
};

// orbit[i] = f^{i - back}(x); planes are pushed forward from the deepest
// backward point so that every index >= back - ... gets at least `back`
// push steps.  Degenerate growth of the second column raises
// PlaneDegeneracy.
PlaneSweep sweep_planes(const AnosovMap& map, const std::vector<TorusPoint>& orbit) {
    const Spectrum& sp = map.spectrum();
    Vec3 u = sp.dir(Tag::uu), w = sp.dir(Tag::wu);
    PlaneSweep out;
    out.plane.resize(orbit.size());
    out.valid_from = 0;
    out.plane[0] = {u, normalized(w - u * dot(w, u))};
    for (std::size_t i = 1; i < orbit.size(); ++i) {
        Mat3 d = map.jacobian(orbit[i - 1]);
        Vec3 a = d * out.plane[i - 1].first;
        Vec3 b = d * out.plane[i - 1].second;
        double na = norm(a);
        if (na < 1e-300) throw PlaneDegeneracy("unstable plane sweep: first column vanished");
        a = a / na;
        Vec3 b_perp = b - a * dot(b, a);
        double nb = norm(b_perp);
        if (nb < 1e-12 * norm(b))
            throw PlaneDegeneracy("unstable plane sweep: columns collapsed onto a line");
        out.plane[i] = {a, b_perp / nb};
    }
    return out;
}

}  // namespace

PlaneSample unstable_plane(const AnosovMap& map, const TorusPoint& x, int n) {
    std::vector<TorusPoint> orbit(std::size_t(n) + 1);
    orbit[std::size_t(n)] = x;
    for (int i = n - 1; i >= 0; --i)
        orbit[std::size_t(i)] = map.inverse_apply(orbit[std::size_t(i) + 1]);
    PlaneSweep sw = sweep_planes(map, orbit);
    PlaneSample out;
    out.base = x;
    out.u1 = sw.plane.back().first;
    out.u2 = sw.plane.back().second;
    out.depth = n;
    return out;
}

BundleSample weak_unstable_direction(const AnosovMap& map, const TorusPoint& x, int n, int m) {
    // orbit[i] = f^{i-n}(x) for i in [0, n+m+1]: n backward points, x,
    // then m+1 forward points (the last one only for the residual audit).
    const std::size_t total = std::size_t(n) + std::size_t(m) + 2;
    std::vector<TorusPoint> orbit(total);
    orbit[std::size_t(n)] = x;
    for (int i = n - 1; i >= 0; --i)
        orbit[std::size_t(i)] = map.inverse_apply(orbit[std::size_t(i) + 1]);
    for (std::size_t i = std::size_t(n) + 1; i < total; ++i)
        orbit[i] = map.apply(orbit[i - 1]);

    PlaneSweep sw = sweep_planes(map, orbit);
    const Vec3 w_ref = map.spectrum().dir(Tag::wu);

    // In-plane inverse iteration ending at orbit[end]; the weak direction
    // is the slowest-contracting one inside the plane under Df^{-1}.
    auto extract = [&](std::size_t end) {
        std::size_t start = end + std::size_t(m);
        const auto& pl = sw.plane[start];
        Vec3 v = pl.first * dot(w_ref, pl.first) + pl.second * dot(w_ref, pl.second);
        double nv = norm(v);
        if (nv < 1e-8)
            throw PlaneDegeneracy("weak direction seed nearly orthogonal to the plane");
        v = v / nv;
        for (std::size_t i = start; i > end; --i) {
            v = solve(map.jacobian(orbit[i - 1]), v);
            const auto& p = sw.plane[i - 1];
            v = p.first * dot(v, p.first) + p.second * dot(v, p.second);
            double n2 = norm(v);
            if (n2 < 1e-300) throw PlaneDegeneracy("in-plane extraction vanished");
            v = v / n2;
        }
        return orient(v, w_ref);
    };

    BundleSample out;
    out.base = x;
    out.tag = Tag::wu;
    out.depth = n + m;
    out.direction = extract(std::size_t(n));
    Vec3 at_fx = extract(std::size_t(n) + 1);
    out.equivariance_residual = line_residual(map, x, out.direction, at_fx);
    return out;
}

Vec3 leaf_direction(const AnosovMap& map, Tag tag, const TorusPoint& x,
                    const BundleOptions& opt) {
    const Spectrum& sp = map.spectrum();
    switch (tag) {
        case Tag::uu: {
            int n = depth_for_rate(sp.dominated_ratio(), opt);
            // No residual audit on the hot path: push once.
            std::vector<TorusPoint> orbit(std::size_t(n) + 1);
            orbit[std::size_t(n)] = x;
            for (int i = n - 1; i >= 0; --i)
                orbit[std::size_t(i)] = map.inverse_apply(orbit[std::size_t(i) + 1]);
            Vec3 seed = sp.dir(Tag::uu);
            Vec3 v = seed;
            for (int i = 0; i < n; ++i) v = normalized(map.jacobian(orbit[std::size_t(i)]) * v);
            return dot(v, seed) < 0.0 ? -v : v;
        }
        case Tag::s: {
            int n = depth_for_rate(std::abs(sp.alpha_of(Tag::s) / sp.alpha_of(Tag::wu)), opt);
            TorusPoint y = x;
            std::vector<TorusPoint> orbit(std::size_t(n) + 1);
            orbit[0] = y;
            for (int i = 1; i <= n; ++i) orbit[std::size_t(i)] = map.apply(orbit[std::size_t(i) - 1]);
            Vec3 seed = sp.dir(Tag::s);
            Vec3 v = seed;
            for (int i = n; i > 0; --i) v = normalized(solve(map.jacobian(orbit[std::size_t(i) - 1]), v));
            return dot(v, seed) < 0.0 ? -v : v;
        }
        default: {
            int n = depth_for_rate(std::abs(sp.alpha_of(Tag::s) / sp.alpha_of(Tag::wu)), opt);
            int m = depth_for_rate(sp.dominated_ratio(), opt);
            return weak_unstable_direction(map, x, n, m).direction;
        }
    }
}

}  // namespace anosov
