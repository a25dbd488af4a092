#pragma once

#include <stdexcept>
#include <string>

namespace anosov {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// An iterative solve (Newton inverse, power iteration, series) failed to
// reach its tolerance within the iteration cap.
struct NonConvergence : Error {
    using Error::Error;
};

// The integer matrix does not have the expected spectrum pattern
// |a_uu| > |a_wu| > 1 > |a_s| > 0 with three distinct real eigenvalues.
struct NotPartiallyHyperbolic : Error {
    using Error::Error;
};

// A grid point violated strict cone invariance or the expansion /
// contraction / domination thresholds.
struct ConeViolation : Error {
    using Error::Error;
};

struct SingularMatrix : Error {
    using Error::Error;
};

// Leaf refinement would exceed the configured vertex budget.
struct VertexBudgetExceeded : Error {
    using Error::Error;
};

// Separation scale is below what the stored leaf resolution supports.
struct ResolutionTooCoarse : Error {
    using Error::Error;
};

// The direction field flipped by more than the continuation threshold
// between consecutive integration steps.
struct OrientationJump : Error {
    using Error::Error;
};

// Block power iteration collapsed onto a line instead of a 2-plane.
struct PlaneDegeneracy : Error {
    using Error::Error;
};

// Too many samples failed the refinement inclusion check for the
// subordinated partition.
struct AdaptednessViolation : Error {
    using Error::Error;
};

// Probe scale fell below the resolution of the evaluated object.
struct ScaleBelowResolution : Error {
    using Error::Error;
};

// A truncated series stopped making progress before its tail bound.
struct SeriesStall : Error {
    using Error::Error;
};

// No certified contraction rate is available to bound a product tail.
struct TailBoundUnavailable : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace anosov
