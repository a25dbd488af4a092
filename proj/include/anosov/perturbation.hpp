#pragma once

// Z^3-periodic trigonometric-polynomial displacement field
//
//   p(x) = (epsilon / 2pi) * sum_m [ c_m cos(2pi m.x) + s_m sin(2pi m.x) ]
//
// with integer frequency triples m and vector amplitudes c_m, s_m.  The
// 1/2pi factor makes the derivative bound come out as
// |Dp| <= epsilon * sum_m |m| (|c_m|^2+|s_m|^2)^(1/2), so epsilon is the
// natural size knob for a single unit-amplitude unit-frequency mode.

#include <cmath>
#include <vector>

#include "anosov/geometry.hpp"

namespace anosov {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

struct FourierMode {
    std::int64_t k[3] = {0, 0, 0};  // frequency triple
    Vec3 cos_amp;
    Vec3 sin_amp;
};

class PerturbationField {
  public:
    PerturbationField() = default;
    PerturbationField(double epsilon, std::vector<FourierMode> modes)
        : epsilon_(epsilon), modes_(std::move(modes)) {}

    double epsilon() const { return epsilon_; }
    const std::vector<FourierMode>& modes() const { return modes_; }
    bool trivial() const { return epsilon_ == 0.0 || modes_.empty(); }

    // Evaluation reduces coordinates mod 1 first; the frequencies are
    // integers, so this is exact and keeps trig arguments small even for
    // far-flung lift coordinates.
    Vec3 value(const Vec3& x) const {
        if (trivial()) return {0, 0, 0};
        double r0 = mod1(x.x), r1 = mod1(x.y), r2 = mod1(x.z);
        Vec3 acc{0, 0, 0};
        for (const FourierMode& mo : modes_) {
            double phase = mod1(double(mo.k[0]) * r0 + double(mo.k[1]) * r1 + double(mo.k[2]) * r2);
            double th = kTwoPi * phase;
            double c = std::cos(th), s = std::sin(th);
            acc += mo.cos_amp * c + mo.sin_amp * s;
        }
        return acc * (epsilon_ / kTwoPi);
    }

    // Jacobian D_ij = d p_i / d x_j.
    Mat3 derivative(const Vec3& x) const {
        Mat3 d;
        if (trivial()) return d;
        double r0 = mod1(x.x), r1 = mod1(x.y), r2 = mod1(x.z);
        for (const FourierMode& mo : modes_) {
            double phase = mod1(double(mo.k[0]) * r0 + double(mo.k[1]) * r1 + double(mo.k[2]) * r2);
            double th = kTwoPi * phase;
            double c = std::cos(th), s = std::sin(th);
            Vec3 amp = mo.sin_amp * c - mo.cos_amp * s;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    d.m[i][j] += amp[i] * double(mo.k[j]);
        }
        return d * epsilon_;
    }

    // Coefficient bounds; may overestimate but never underestimate.
    double sup_bound() const {
        double s = 0;
        for (const FourierMode& mo : modes_) s += mode_amp(mo);
        return std::abs(epsilon_) / kTwoPi * s;
    }

    double derivative_sup_bound() const {
        double s = 0;
        for (const FourierMode& mo : modes_) s += freq_norm(mo) * mode_amp(mo);
        return std::abs(epsilon_) * s;
    }

    double second_derivative_sup_bound() const {
        double s = 0;
        for (const FourierMode& mo : modes_) s += freq_norm(mo) * freq_norm(mo) * mode_amp(mo);
        return std::abs(epsilon_) * kTwoPi * s;
    }

  private:
    static double mode_amp(const FourierMode& mo) {
        return std::sqrt(dot(mo.cos_amp, mo.cos_amp) + dot(mo.sin_amp, mo.sin_amp));
    }
    static double freq_norm(const FourierMode& mo) {
        double a = double(mo.k[0]), b = double(mo.k[1]), c = double(mo.k[2]);
        return std::sqrt(a * a + b * b + c * c);
    }

    double epsilon_ = 0.0;
    std::vector<FourierMode> modes_;
};

}  // namespace anosov
