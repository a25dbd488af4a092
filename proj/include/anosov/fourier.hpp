#pragma once

// Band-limited trigonometric expansion of a periodic vector field
// sampled on a uniform n^3 lattice.  The transform is a direct separable
// DFT (axis by axis), so it needs no FFT machinery and stays exact for
// the integer phases involved; it is meant for modest grids and small
// frequency cutoffs, which is all the map families require.

#include <vector>

#include "anosov/geometry.hpp"
#include "anosov/perturbation.hpp"

namespace anosov {

// Real modes with |k|_inf <= kmax, canonical representatives (first
// nonzero frequency component positive), amplitudes scaled so that
// PerturbationField(1.0, modes) reproduces the band-limited part of the
// samples.  Modes with amplitude below drop_below are omitted.  `value`
// is indexed ((i*n)+j)*n+k over lattice points (i/n, j/n, k/n).
std::vector<FourierMode> grid_to_modes(const std::vector<Vec3>& value, int n, int kmax,
                                       double drop_below = 0.0);

}  // namespace anosov
