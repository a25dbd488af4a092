#pragma once

// Map families the experiments and acceptance checks draw from: the
// reference automorphism, maps built as smooth conjugates of it, and a
// seeded generic ensemble of trigonometric perturbations.

#include <cstdint>

#include "anosov/cones.hpp"
#include "anosov/map.hpp"

namespace anosov {
namespace families {

// [[2,1,0],[1,2,1],[0,1,1]]: unimodular, three distinct real eigenvalues
// 3.2470 > 1.5552 > 1 > 0.1981.
IntMat3 reference_matrix();

// f = g A g^{-1} for the volume-preserving-or-not diffeo g = id + psi,
// re-expanded in the A + p form this library works with: p is the
// band-limited Fourier expansion of g(A g^{-1} x) - A x, and the
// truncation *defines* the family member.  Its exact conjugator to A
// therefore differs from g^{-1} by O(truncation_sup), which the
// construction keeps orders of magnitude below the recovery tolerances.
struct SmoothConjugate {
    AnosovMap map;
    PerturbationField psi;  // g = id + psi
    double truncation_sup = 0.0;

    Vec3 g(const Vec3& x) const { return x + psi.value(x); }
    Vec3 g_inverse(const Vec3& x) const;  // contraction iteration on the lift
};

SmoothConjugate smooth_conjugate(double eta, int kmax = 6, int grid_n = 48);

// Member `index` of the seeded generic ensemble: 3 to 5 random modes
// with frequencies in [-2,2]^3, amplitudes normalized so the derivative
// bound equals eps (the same size knob a single unit mode has).  Draws
// that fail cone certification are discarded deterministically, so the
// same (seed, index) always yields the same certified map.
AnosovMap generic_member(std::uint64_t seed, int index, double eps = 0.08);

// Certificate request the family construction and the experiment driver
// share; modest grid, enough for the eps ranges used here.
ConeRequest family_cone_request();

}  // namespace families
}  // namespace anosov
