#pragma once

// Invariant densities along leaves and volume-side measurements.
//
// The conditional density of the natural measure along an expanding
// foliation is the infinite product of one-step leaf jacobian ratios
// down the backward orbit.  The product is truncated with a certified
// tail bound: leaf distance contracts at least at the certificate's
// minimum expansion rate, and the leaf-wise Lipschitz constant of the
// log jacobian is measured along sampled arcs with a safety factor.

#include <array>
#include <cstdint>
#include <vector>

#include "anosov/cones.hpp"
#include "anosov/growth.hpp"
#include "anosov/leaf.hpp"
#include "anosov/lyapunov.hpp"
#include "anosov/map.hpp"

namespace anosov {

// One-step expansion factor of the tag's leaf direction, in the view
// under which that foliation expands.
double leaf_jacobian(const AnosovMap& map, Tag tag, const TorusPoint& x);

struct DeltaOptions {
    double tol = 1e-10;   // truncation tail target, in exact arithmetic
    double chart = 1.0;   // largest leaf separation the machine certifies
    int max_terms = 512;
    double safety = 4.0;    // multiplier on the measured Lipschitz constant
    int lip_samples = 24;   // arcs sampled for that constant
    double lip_radius = 0.02;
    std::uint64_t seed = 20260214;
};

// Precomputed tail data for one map and tag.  The truncation depth is
// fixed once from the chart-scale tail bound rather than per pair, so
// every product shares one chain depth and chain rounding cancels
// exactly in cocycle triples and density ratios.
struct DeltaMachine {
    const AnosovMap* map = nullptr;
    Tag tag = Tag::uu;
    double lipschitz = 0.0;  // measured sup of |d log J| along the leaf, times safety
    double lambda = 0.0;     // certified minimum one-step leaf expansion
    int terms = 0;           // shared truncation depth
    DeltaOptions opt;
};

// Requires a cone certificate for the same map; throws
// TailBoundUnavailable when the certificate cannot bound the tail (the
// tag's minimum leaf expansion does not clear one).
DeltaMachine make_delta_machine(const AnosovMap& map, Tag tag, const ConeCertificate& cert,
                                const DeltaOptions& opt = {});

// Density ratio Delta(x, y) = rho(x) / rho(y) of the conditional measure
// along the foliation, for x and y on a common local leaf within the
// machine's chart scale.  Concretely the product over the backward view
// orbit of the one-step leaf jacobian ratios J(y_-j) / J(x_-j); mass is
// thin where the backward orbit crossed strong expansion.  The
// truncation tail is certified in exact arithmetic.  Chain rounding is
// amplified down backward orbits and adds noise to lone values (about
// 1e-4 relative on uu at perturbation scale, worse on the slower wu),
// but it is shared between products from one machine and cancels in
// cocycle and density comparisons.
double delta_product(const DeltaMachine& machine, const TorusPoint& x, const TorusPoint& y);

struct LeafDensity {
    std::vector<double> density;  // per arc vertex, integrates to one against arclength
    double normalization = 0.0;   // trapezoid mass the raw ratios carried
};

// Conditional density along an already grown arc, normalized on the arc.
LeafDensity leaf_density(const DeltaMachine& machine, const LeafSegment& arc);

// Pushforward realization of a measure absolutely continuous along one
// expanding foliation: arclength-uniform draws on a seed arc, each moved
// a uniform random number of steps in {0 .. depth-1} by the view under
// which the tag expands, equal weights.
struct EmpiricalMeasure {
    Tag tag = Tag::uu;
    int depth = 0;
    std::uint64_t seed = 0;
    TorusPoint seed_base;      // seed arc descriptor
    double seed_radius = 0.0;

    std::vector<TorusPoint> sample;
    std::vector<double> weight;  // positive, sums to one

    // Trigonometric moments over wave vectors of squared frequency <= 3,
    // one representative per +-k pair (13 waves; with both phases and the
    // constant that is the 27-function invariance battery).
    std::vector<std::array<int, 3>> wave;
    std::vector<double> moment_cos, moment_sin;
    double invariance_defect = 0.0;  // max battery gap |E[phi o f] - E[phi]|

    // Moment of cos/sin(2 pi k.x) for a listed wave vector.
    double cos_moment(int k0, int k1, int k2) const;
    double sin_moment(int k0, int k1, int k2) const;
};

// The averaging depth trades defect for cost: the battery defect
// telescopes to O(1/depth) plus sampling noise.
EmpiricalMeasure ac_invariant_measure(const AnosovMap& map, Tag tag, const LeafSegment& seed_leaf,
                                      int depth, int samples, std::uint64_t seed);

// Leaf expansion exponent averaged against mu: the mean log one-step
// leaf jacobian, positive for every tag (s is read in the backward
// view, so this is the exponent of f^{-1} along W^s).
LyapunovEstimate lebesgue_exponent(const AnosovMap& map, Tag tag, const EmpiricalMeasure& mu);

struct SaghinXiaCheck {
    Tag tag = Tag::uu;
    LyapunovEstimate lambda;  // exponent against mu
    ChiEstimate chi;          // leaf-volume growth over the base family
    double slack = 0.0;       // chi.mean - lambda.value
    double sigma = 0.0;       // combined standard error of the slack
};

// Exponent versus geometric growth along one foliation.  The exponent
// never exceeds the growth beyond combined noise; equality within noise
// is the conservative (smoothly conjugate) signature, slack above three
// sigma the strict-gap signature.
SaghinXiaCheck saghin_xia_check(const AnosovMap& map, Tag tag, const EmpiricalMeasure& mu,
                                const std::vector<TorusPoint>& bases,
                                const GrowthOptions& opt = {});

struct ConditionalEntropyOptions {
    int resolution = 3;  // dyadic cubes of side 2^-resolution
    int depth = 10;      // refinement levels R
    int samples = 48;    // cell base points, strided through mu
    double radius = 0.35;  // root arc half-length; must swallow a cell
    int scan = 16;         // per-side scan before bisection
    int bisect = 40;
    int density_grid = 129;  // quadrature nodes for cell masses
    double adaptedness_tolerance = 0.001;  // tolerated fraction of bad cells
    GrowOptions grow;
    DeltaOptions delta;
};

struct ConditionalEntropyEstimate {
    Tag tag = Tag::uu;
    int resolution = 0;
    int depth = 0;
    int samples = 0;
    std::vector<double> mean_neglog;  // E_x[-log mass ratio] per level 0..depth
    double value = 0.0;               // slope of that series: the entropy rate
    double value_stderr = 0.0;
    double violation_fraction = 0.0;  // non-interval or escaped cells observed
};

// Conditional entropy of the tag's foliation under adapted refinement,
// averaged over cell base points drawn from mu.  Cells are leaf
// components inside dyadic cubes; level k keeps the part of the cell
// whose first k images stay with the base point's cubes, and cell mass
// is conditional (density-weighted) leaf measure.  Throws
// AdaptednessViolation when more than the tolerated fraction of cells
// fails the interval audit.
ConditionalEntropyEstimate conditional_entropy(const AnosovMap& map, Tag tag,
                                               const ConeCertificate& cert,
                                               const EmpiricalMeasure& mu,
                                               const ConditionalEntropyOptions& opt = {});

}  // namespace anosov
