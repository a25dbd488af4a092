#include "anosov/families.hpp"

#include <cmath>
#include <random>

#include "anosov/errors.hpp"
#include "anosov/fourier.hpp"
#include "anosov/util.hpp"

namespace anosov {
namespace families {

IntMat3 reference_matrix() {
    IntMat3 a;
    const long long rows[3][3] = {{2, 1, 0}, {1, 2, 1}, {0, 1, 1}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) a.m[i][j] = rows[i][j];
    return a;
}

Vec3 SmoothConjugate::g_inverse(const Vec3& y) const {
    // x = y - psi(x); |D psi| < 1 by construction, so plain iteration
    // contracts geometrically.
    Vec3 x = y;
    for (int it = 0; it < 200; ++it) {
        Vec3 next = y - psi.value(x);
        double step = norm(next - x);
        x = next;
        if (step < 1e-15) return x;
    }
    throw NonConvergence("SmoothConjugate::g_inverse: contraction iteration stalled");
}

SmoothConjugate smooth_conjugate(double eta, int kmax, int grid_n) {
    if (!(eta > 0.0) || eta > 0.05)
        throw ConfigError("smooth_conjugate: eta must lie in (0, 0.05] to keep g a diffeomorphism");
    if (kmax < 2) throw ConfigError("smooth_conjugate: kmax must be at least 2");

    std::vector<FourierMode> gen(2);
    gen[0].k[0] = 1;
    gen[0].sin_amp = {0.7, 0.5, -0.3};
    gen[1].k[1] = 1;
    gen[1].k[2] = 1;
    gen[1].cos_amp = {0.2, -0.6, 0.4};
    PerturbationField psi(eta, gen);

    IntMat3 a = reference_matrix();
    Mat3 am = a.to_mat();

    SmoothConjugate fam{AnosovMap(a, PerturbationField()), psi, 0.0};

    // Sample q(x) = g(A g^{-1} x) - A x on the lattice and expand it.
    auto q = [&](const Vec3& x) {
        Vec3 xi = fam.g_inverse(x);
        return am * (xi - x) + psi.value(am * xi);
    };
    std::vector<Vec3> sample(std::size_t(grid_n) * std::size_t(grid_n) * std::size_t(grid_n));
    const double h = 1.0 / grid_n;
    parallel_for(sample.size(), 0, [&](std::size_t idx) {
        int k = int(idx % std::size_t(grid_n));
        int j = int((idx / std::size_t(grid_n)) % std::size_t(grid_n));
        int i = int(idx / (std::size_t(grid_n) * std::size_t(grid_n)));
        sample[idx] = q({i * h, j * h, k * h});
    });
    std::vector<FourierMode> modes = grid_to_modes(sample, grid_n, kmax, 1e-13);
    fam.map = AnosovMap(a, PerturbationField(1.0, modes));

    // Dropped-tail size, measured off-lattice so aliasing cannot hide.
    const int m = 31;
    std::vector<double> err(std::size_t(m) * std::size_t(m) * std::size_t(m));
    const PerturbationField& p = fam.map.perturbation();
    parallel_for(err.size(), 0, [&](std::size_t idx) {
        int k = int(idx % std::size_t(m));
        int j = int((idx / std::size_t(m)) % std::size_t(m));
        int i = int(idx / (std::size_t(m) * std::size_t(m)));
        Vec3 x{(i + 0.5) / m, (j + 0.5) / m, (k + 0.5) / m};
        err[idx] = norm(q(x) - p.value(x));
    });
    for (double e : err) fam.truncation_sup = std::max(fam.truncation_sup, e);
    return fam;
}

ConeRequest family_cone_request() {
    ConeRequest req;
    req.grid_n = 12;
    req.boundary_samples = 360;
    return req;
}

AnosovMap generic_member(std::uint64_t seed, int index, double eps) {
    if (index < 0) throw ConfigError("generic_member: index must be nonnegative");
    if (!(eps > 0.0)) throw ConfigError("generic_member: eps must be positive");
    IntMat3 a = reference_matrix();
    for (int attempt = 0; attempt < 64; ++attempt) {
        std::mt19937_64 rng(derive_seed(seed, std::uint64_t(index) * 64 + std::uint64_t(attempt)));
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        std::uniform_int_distribution<int> freq(-2, 2);
        std::uniform_int_distribution<int> nmodes(3, 5);

        int want = nmodes(rng);
        std::vector<FourierMode> modes;
        while (int(modes.size()) < want) {
            FourierMode mo;
            for (int c = 0; c < 3; ++c) mo.k[c] = freq(rng);
            if (mo.k[0] == 0 && mo.k[1] == 0 && mo.k[2] == 0) continue;
            // Canonicalize so equal frequencies cannot hide as +/- pairs.
            if (mo.k[0] < 0 || (mo.k[0] == 0 && (mo.k[1] < 0 || (mo.k[1] == 0 && mo.k[2] < 0))))
                for (int c = 0; c < 3; ++c) mo.k[c] = -mo.k[c];
            for (int c = 0; c < 3; ++c) {
                mo.cos_amp[c] = unit(rng);
                mo.sin_amp[c] = unit(rng);
            }
            modes.push_back(mo);
        }
        // Normalize the derivative budget: sum |k| * amp = 1, so the
        // resulting field has the same size knob as a single unit mode.
        double deriv = 0.0;
        for (const FourierMode& mo : modes) {
            double amp = std::sqrt(dot(mo.cos_amp, mo.cos_amp) + dot(mo.sin_amp, mo.sin_amp));
            double fr = std::sqrt(double(mo.k[0] * mo.k[0] + mo.k[1] * mo.k[1] + mo.k[2] * mo.k[2]));
            deriv += fr * amp;
        }
        for (FourierMode& mo : modes) {
            mo.cos_amp *= 1.0 / deriv;
            mo.sin_amp *= 1.0 / deriv;
        }
        AnosovMap candidate(a, PerturbationField(eps, modes));
        try {
            verify_cone_condition(candidate, family_cone_request());
            return candidate;
        } catch (const ConeViolation&) {
            continue;
        }
    }
    throw NonConvergence("generic_member: no certifiable draw in 64 attempts");
}

}  // namespace families
}  // namespace anosov
