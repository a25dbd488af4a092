#pragma once

// Eigendata of the integer linear part.  Admission requires three
// distinct real eigenvalues with |a_uu| > |a_wu| > 1 > |a_s| > 0, i.e. a
// two-dimensional expanding and a one-dimensional contracting part.

#include <array>

#include "anosov/geometry.hpp"

namespace anosov {

enum class Tag { uu, wu, s };

inline const char* tag_name(Tag t) {
    switch (t) {
        case Tag::uu: return "uu";
        case Tag::wu: return "wu";
        default: return "s";
    }
}

struct Spectrum {
    // Sorted by modulus, descending: [0]=uu, [1]=wu, [2]=s.
    std::array<double, 3> alpha{};        // signed eigenvalues
    std::array<double, 3> log_modulus{};  // log |alpha_i|
    std::array<Vec3, 3> right{};          // unit right eigenvectors
    std::array<Vec3, 3> left{};           // rows of V^{-1}; <left[i], v> extracts component i

    double alpha_of(Tag t) const { return alpha[index(t)]; }
    double log_of(Tag t) const { return log_modulus[index(t)]; }
    const Vec3& dir(Tag t) const { return right[index(t)]; }
    const Vec3& codir(Tag t) const { return left[index(t)]; }

    // |alpha_wu / alpha_uu|: convergence rate of strong-direction power
    // iteration and of the in-plane extraction of the weak direction.
    double dominated_ratio() const { return std::abs(alpha[1] / alpha[0]); }

    static int index(Tag t) { return t == Tag::uu ? 0 : (t == Tag::wu ? 1 : 2); }
};

// Throws NotPartiallyHyperbolic if the matrix has |det| != 1, a repeated
// or non-real eigenvalue, an eigenvalue of modulus one, or fewer than two
// expanding directions.
Spectrum spectrum(const IntMat3& a);

}  // namespace anosov
