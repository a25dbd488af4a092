#pragma once

// Conjugacy to the linear part.  H = id + u solves H o F = A o H, which
// in the eigenbasis of A splits into one scalar twisted cohomology
// equation per eigenvalue:
//
//   u_i(x) =  sum_{k>=1} alpha_i^{-k} p_i(F^{k-1} x)     (|alpha_i| > 1)
//   u_i(x) = -sum_{k>=0} alpha_i^{+k} p_i(F^{-k-1} x)    (|alpha_i| < 1)
//
// with p_i the i-th dual-basis component of the displacement p.  Both
// series converge geometrically, so u is evaluated pointwise by summing
// them directly; the sampled grid field exists for diagnostics and
// export, not for the residual checks, because u is in general only
// Holder and interpolation would cap the achievable accuracy.
//
// No anchoring step is needed: the bounded solution of the twisted
// equation is unique (1 is not an eigenvalue of A), and it automatically
// sends the continued fixed point of F to the fixed point 0 of A.

#include <array>
#include <cstdint>
#include <vector>

#include "anosov/geometry.hpp"
#include "anosov/leaf.hpp"
#include "anosov/map.hpp"

namespace anosov {

// Z^3-periodic vector field sampled on a uniform n^3 lattice with
// trilinear interpolation in between.  Lattice node (i,j,k) sits at
// (i/n, j/n, k/n); evaluation reduces coordinates mod 1 first.
struct PeriodicField {
    int n = 0;
    std::vector<Vec3> value;  // ((i*n)+j)*n + k

    const Vec3& at(int i, int j, int k) const { return value[std::size_t((i * n + j)) * std::size_t(n) + std::size_t(k)]; }
    Vec3 operator()(const Vec3& x) const;
    double sup_norm() const;
};

// Truncation record of the three eigen-component series.  `terms` is the
// number of retained orbit terms; `tail_bound` adds the dropped tail to
// the accumulated orbit round-off, so it is the certified pointwise
// accuracy of the evaluated component, which can sit above the requested
// tolerance: the weak-unstable series runs along a forward orbit whose
// rounding noise grows by alpha_uu/alpha_wu per step, and the truncation
// depth stops where tail plus noise is smallest.
struct ConjugacySeries {
    double tol = 0.0;
    std::array<int, 3> terms{};        // uu, wu, s
    std::array<double, 3> coeff_sup{}; // sup |p_i|, exact coefficient bound
    std::array<double, 3> tail_bound{};
    double basis_cond = 0.0;           // ||V|| ||V^-1|| of the eigenbasis
};

struct ConjugacyMap {
    PeriodicField u;
    ConjugacySeries series;
    double residual = 0.0;  // sup |H(Fx) - A H(x)| on a staggered check grid
    int residual_grid = 0;
};

// Displacement u(x) by direct series summation, and the lifted conjugacy
// H(x) = x + u(x mod 1).  H commutes with deck translations, so lifts of
// leaf arcs can be pushed through it without wrap bookkeeping.
Vec3 conjugacy_displacement(const AnosovMap& map, const ConjugacySeries& series, const Vec3& x);
Vec3 conjugate_point(const AnosovMap& map, const ConjugacySeries& series, const Vec3& x);

// Solves the twisted equations for the map's displacement field.  `tol`
// is the requested pointwise tail target; the achieved per-component
// bound is reported in series.tail_bound.  Throws SeriesStall when the
// noise-limited floor of some component exceeds 1e-5, which happens when
// the weak expansion sits too close to 1 for double-precision orbits.
ConjugacyMap solve_conjugacy(const AnosovMap& map, int grid_n, double tol = 1e-9);

struct SemiconjugacyCheck {
    int grid_n = 0;
    double residual = 0.0;        // sup torus distance d(H(f x), A H(x))
    long long collisions = 0;     // image pairs closer than image_tol whose
                                  // sources are farther than source_tol
    double image_tol = 1e-9;
    double source_tol = 1e-6;
    bool injective_proxy = true;  // collisions == 0
};

// Residual sweep over the full grid_n^3 lattice plus the injectivity
// audit; u is evaluated by series at every point, never interpolated.
SemiconjugacyCheck verify_semiconjugacy(const AnosovMap& map, const ConjugacyMap& conj, int grid_n);

// How far the H-image of a leaf arc through x strays from the matching
// linear object through H(x).  `line` measures against the eigenline of
// the tag; `plane` against the A-invariant plane spanned by the tag's
// line and its unstable-plane partner (uu/wu: the unstable plane; s: the
// span of s and wu).  Weak-unstable and stable images should track their
// lines; strong-unstable images are only guaranteed to stay in-plane.
struct FoliationImageCheck {
    Tag tag = Tag::uu;
    double radius = 0.0;
    int samples = 0;
    double line = 0.0;
    double plane = 0.0;
};

FoliationImageCheck foliation_image_check(const AnosovMap& map, const ConjugacyMap& conj, Tag tag,
                                          const TorusPoint& x, double radius,
                                          const GrowOptions& grow = {});

enum class RegularityVerdict { c1_consistent, sub_lipschitz, inconclusive };

const char* verdict_name(RegularityVerdict v);

struct RegularityOptions {
    double radius = 0.25;       // coarsest leaf scale of the dyadic ladder
    int levels = 8;
    int skip_coarse = 1;        // coarsest scales excluded from the fit
    double floor = 1e-7;        // evaluation resolution of H
    double floor_factor = 10.0; // finest fitted scale must exceed floor * factor
    double c1_band = 0.05;
    double stabilization_band = 0.05;
    GrowOptions grow;
};

// Log-log fit of the H-displacement along the image eigenline against
// leaf arclength, pooled over base points and both leaf sides.  The
// verdict is C1-consistent when the exponent is within c1_band of 1 and
// the two finest pooled quotients agree within stabilization_band;
// sub-Lipschitz when the exponent falls below 1 - c1_band; otherwise
// inconclusive.
struct RegularityReport {
    Tag tag = Tag::uu;
    std::vector<TorusPoint> base;
    std::vector<double> scale;     // dyadic, coarse to fine
    std::vector<double> quotient;  // pooled mean displacement / scale
    double exponent = 0.0;
    double exponent_stderr = 0.0;
    double stabilization = 0.0;    // |q_finest / q_next - 1|
    RegularityVerdict verdict = RegularityVerdict::inconclusive;
};

RegularityReport leafwise_regularity_probe(const AnosovMap& map, const ConjugacyMap& conj, Tag tag,
                                           const std::vector<TorusPoint>& bases,
                                           const RegularityOptions& opt = {});

}  // namespace anosov
