#pragma once

// Maps shared across test suites: the reference hyperbolic matrix and a
// couple of small perturbation families.

#include "anosov/perturbation.hpp"
#include "anosov/spectrum.hpp"

namespace anosov::fixtures {

inline IntMat3 reference_matrix() {
    IntMat3 a;
    std::int64_t rows[3][3] = {{2, 1, 0}, {1, 2, 1}, {0, 1, 1}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) a.m[i][j] = rows[i][j];
    return a;
}

inline PerturbationField single_mode(double eps) {
    FourierMode mo;
    mo.k[0] = 0; mo.k[1] = 1; mo.k[2] = 0;
    mo.sin_amp = {1, 0, 0};
    return PerturbationField(eps, {mo});
}

// p_1 = (eps/2pi) sin(2pi (x2+x3)); a shear aligned with the cofactor
// structure of the reference matrix, so det Df == 1 identically.
inline PerturbationField volume_preserving_mode(double eps) {
    FourierMode mo;
    mo.k[0] = 0; mo.k[1] = 1; mo.k[2] = 1;
    mo.sin_amp = {1, 0, 0};
    return PerturbationField(eps, {mo});
}

}  // namespace anosov::fixtures
