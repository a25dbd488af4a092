#include "anosov/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "anosov/errors.hpp"

namespace anosov {
namespace {

// Characteristic polynomial x^3 - t x^2 + m x - d with integer
// coefficients, evaluated in double.
struct CharPoly {
    std::int64_t t, m, d;
    double operator()(double x) const { return ((x - double(t)) * x + double(m)) * x - double(d); }
    double deriv(double x) const { return (3.0 * x - 2.0 * double(t)) * x + double(m); }
};

double bisect_root(const CharPoly& p, double lo, double hi) {
    double flo = p(lo);
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        double fm = p(mid);
        if ((flo <= 0.0) == (fm <= 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    double r = 0.5 * (lo + hi);
    // Newton polish; the roots are simple, so this is safe.
    for (int it = 0; it < 4; ++it) {
        double dp = p.deriv(r);
        if (dp == 0.0) break;
        r -= p(r) / dp;
    }
    return r;
}

Vec3 eigenvector(const Mat3& a, double alpha) {
    Mat3 b = a;
    for (int i = 0; i < 3; ++i) b.m[i][i] -= alpha;
    Vec3 c0 = cross(b.row(0), b.row(1));
    Vec3 c1 = cross(b.row(0), b.row(2));
    Vec3 c2 = cross(b.row(1), b.row(2));
    Vec3 best = c0;
    if (norm(c1) > norm(best)) best = c1;
    if (norm(c2) > norm(best)) best = c2;
    if (norm(best) < 1e-12)
        throw NotPartiallyHyperbolic("eigenvector extraction degenerate (near-repeated eigenvalue)");
    Vec3 v = normalized(best);
    // Deterministic sign: largest-magnitude component positive.
    int k = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(v[i]) > std::abs(v[k])) k = i;
    if (v[k] < 0.0) v = -v;
    return v;
}

}  // namespace

Spectrum spectrum(const IntMat3& a) {
    const std::int64_t d = a.det();
    if (d != 1 && d != -1)
        throw NotPartiallyHyperbolic("linear part must have determinant +-1, got " + std::to_string(d));

    const std::int64_t t = a.trace();
    const std::int64_t m = a.minor_sum();

    // Discriminant of x^3 + bx^2 + cx + e with b=-t, c=m, e=-d; exact in
    // 64-bit for desk-sized entries.  Positive iff three distinct real roots.
    const std::int64_t b = -t, c = m, e = -d;
    const std::int64_t disc =
        18 * b * c * e - 4 * b * b * b * e + b * b * c * c - 4 * c * c * c - 27 * e * e;
    if (disc <= 0)
        throw NotPartiallyHyperbolic("characteristic polynomial lacks three distinct real roots");

    // p(1) = 0 or p(-1) = 0 would mean an eigenvalue of modulus one; any
    // other real root of an integer cubic has modulus != 1.
    const CharPoly p{t, m, d};
    const std::int64_t p1 = 1 - t + m - d;
    const std::int64_t pm1 = -1 - t - m - d;
    if (p1 == 0 || pm1 == 0)
        throw NotPartiallyHyperbolic("eigenvalue of modulus one (not Anosov)");

    // Three distinct real roots interleave with the critical points of p.
    const double tc = double(t), mc = double(m);
    const double disc_crit = tc * tc - 3.0 * mc;
    if (disc_crit <= 0.0)
        throw NotPartiallyHyperbolic("cubic has no two real critical points");
    const double sq = std::sqrt(disc_crit);
    const double x_lo = (tc - sq) / 3.0, x_hi = (tc + sq) / 3.0;
    const double bound =
        1.0 + std::max({std::abs(tc), std::abs(mc), std::abs(double(d))});

    double roots[3];
    roots[0] = bisect_root(p, -bound, x_lo);
    roots[1] = bisect_root(p, x_lo, x_hi);
    roots[2] = bisect_root(p, x_hi, bound);

    std::sort(roots, roots + 3,
              [](double u, double v) { return std::abs(u) > std::abs(v); });

    if (!(std::abs(roots[1]) > 1.0 && 1.0 > std::abs(roots[2]) && std::abs(roots[2]) > 0.0))
        throw NotPartiallyHyperbolic(
            "expected two expanding and one contracting eigenvalue, got moduli " +
            std::to_string(std::abs(roots[0])) + ", " + std::to_string(std::abs(roots[1])) +
            ", " + std::to_string(std::abs(roots[2])));

    Spectrum sp;
    const Mat3 am = a.to_mat();
    Mat3 v_cols;
    for (int i = 0; i < 3; ++i) {
        sp.alpha[i] = roots[i];
        sp.log_modulus[i] = std::log(std::abs(roots[i]));
        sp.right[i] = eigenvector(am, roots[i]);
        Vec3 resid = am * sp.right[i] - sp.right[i] * roots[i];
        if (norm(resid) > 1e-10)
            throw NotPartiallyHyperbolic("eigenvector residual above 1e-10");
        for (int r = 0; r < 3; ++r) v_cols.m[r][i] = sp.right[i][r];
    }
    Mat3 v_inv = inverse(v_cols);
    for (int i = 0; i < 3; ++i) sp.left[i] = v_inv.row(i);
    return sp;
}

}  // namespace anosov
