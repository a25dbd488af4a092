#include "anosov/fourier.hpp"

#include <complex>

#include "anosov/errors.hpp"

namespace anosov {

namespace {

using C3 = std::array<std::complex<double>, 3>;

}  // namespace

std::vector<FourierMode> grid_to_modes(const std::vector<Vec3>& value, int n, int kmax,
                                       double drop_below) {
    if (n < 2) throw ConfigError("grid_to_modes: n must be at least 2");
    if (kmax < 0 || 2 * kmax + 1 > n)
        throw ConfigError("grid_to_modes: need n > 2*kmax to avoid aliasing the band");
    if (value.size() != std::size_t(n) * std::size_t(n) * std::size_t(n))
        throw ConfigError("grid_to_modes: value size does not match n^3");

    const int nk = 2 * kmax + 1;
    auto kidx = [kmax](int k) { return std::size_t(k + kmax); };

    // Exact roots of unity; phases below are integers mod n.
    auto w = std::vector<std::complex<double>>(std::size_t(n));
    for (int t = 0; t < n; ++t)
        w[std::size_t(t)] = {std::cos(kTwoPi * t / n), -std::sin(kTwoPi * t / n)};
    auto root = [&](long long k, long long i) {
        return w[std::size_t(((k * i) % n + n) % n)];
    };

    // Axis-by-axis contraction: z first, then y, then x.
    std::vector<C3> g1(std::size_t(n) * std::size_t(n) * std::size_t(nk));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int kz = -kmax; kz <= kmax; ++kz) {
                C3 acc{};
                for (int k = 0; k < n; ++k) {
                    const Vec3& v = value[(std::size_t(i) * n + std::size_t(j)) * n + std::size_t(k)];
                    std::complex<double> e = root(kz, k);
                    acc[0] += v.x * e;
                    acc[1] += v.y * e;
                    acc[2] += v.z * e;
                }
                g1[(std::size_t(i) * n + std::size_t(j)) * std::size_t(nk) + kidx(kz)] = acc;
            }

    std::vector<C3> g2(std::size_t(n) * std::size_t(nk) * std::size_t(nk));
    for (int i = 0; i < n; ++i)
        for (int ky = -kmax; ky <= kmax; ++ky)
            for (int kz = -kmax; kz <= kmax; ++kz) {
                C3 acc{};
                for (int j = 0; j < n; ++j) {
                    const C3& v = g1[(std::size_t(i) * n + std::size_t(j)) * std::size_t(nk) + kidx(kz)];
                    std::complex<double> e = root(ky, j);
                    for (int c = 0; c < 3; ++c) acc[std::size_t(c)] += v[std::size_t(c)] * e;
                }
                g2[(std::size_t(i) * std::size_t(nk) + kidx(ky)) * std::size_t(nk) + kidx(kz)] = acc;
            }

    const double scale = 1.0 / (double(n) * double(n) * double(n));
    std::vector<FourierMode> modes;
    for (int kx = -kmax; kx <= kmax; ++kx)
        for (int ky = -kmax; ky <= kmax; ++ky)
            for (int kz = -kmax; kz <= kmax; ++kz) {
                // Canonical half-space: first nonzero component positive;
                // the k = 0 mode is kept as a pure cosine (constant).
                if (kx < 0) continue;
                if (kx == 0 && ky < 0) continue;
                if (kx == 0 && ky == 0 && kz < 0) continue;
                C3 acc{};
                for (int i = 0; i < n; ++i) {
                    const C3& v = g2[(std::size_t(i) * std::size_t(nk) + kidx(ky)) * std::size_t(nk) + kidx(kz)];
                    std::complex<double> e = root(kx, i);
                    for (int c = 0; c < 3; ++c) acc[std::size_t(c)] += v[std::size_t(c)] * e;
                }
                bool zero_mode = kx == 0 && ky == 0 && kz == 0;
                double pair = zero_mode ? 1.0 : 2.0;
                FourierMode mo;
                mo.k[0] = kx;
                mo.k[1] = ky;
                mo.k[2] = kz;
                for (int c = 0; c < 3; ++c) {
                    mo.cos_amp[c] = kTwoPi * pair * scale * acc[std::size_t(c)].real();
                    mo.sin_amp[c] = -kTwoPi * pair * scale * acc[std::size_t(c)].imag();
                }
                if (zero_mode) mo.sin_amp = {0, 0, 0};
                double amp = std::sqrt(dot(mo.cos_amp, mo.cos_amp) + dot(mo.sin_amp, mo.sin_amp));
                if (amp > drop_below) modes.push_back(mo);
            }
    return modes;
}

}  // namespace anosov
