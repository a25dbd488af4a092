#pragma once

// The map family f = A + p on T^3: hyperbolic unimodular integer linear
// part A plus a periodic trigonometric displacement p.  The lift
// F(x) = Ax + p(x) satisfies F(x + n) = F(x) + An for integer n, so orbit
// computations can stay on unreduced coordinates.  Inverses are Newton
// solves on the lift seeded with the exact integer inverse of A.

#include "anosov/geometry.hpp"
#include "anosov/perturbation.hpp"
#include "anosov/spectrum.hpp"

namespace anosov {

class AnosovMap {
  public:
    AnosovMap(const IntMat3& a, PerturbationField p)
        : a_(a),
          a_mat_(a.to_mat()),
          a_inv_mat_(a.unimodular_inverse().to_mat()),
          spectrum_(anosov::spectrum(a)),
          p_(std::move(p)) {}

    const IntMat3& linear_part() const { return a_; }
    const Mat3& linear_mat() const { return a_mat_; }
    const Mat3& linear_inverse_mat() const { return a_inv_mat_; }
    const Spectrum& spectrum() const { return spectrum_; }
    const PerturbationField& perturbation() const { return p_; }
    bool linear() const { return p_.trivial(); }

    Vec3 lift_apply(const Vec3& x) const { return a_mat_ * x + p_.value(x); }

    TorusPoint apply(const TorusPoint& x) const { return TorusPoint(lift_apply(x.r)); }

    Mat3 jacobian(const Vec3& x) const {
        if (p_.trivial()) return a_mat_;
        return a_mat_ + p_.derivative(x);
    }
    Mat3 jacobian(const TorusPoint& x) const { return jacobian(x.r); }

    // Solves F(x) = y on the lift.  Newton from A^{-1} y; the perturbation
    // is small next to the linear part in every admissible configuration,
    // so convergence is quadratic in practice.
    Vec3 lift_inverse(const Vec3& y) const;

    TorusPoint inverse_apply(const TorusPoint& y) const {
        return TorusPoint(lift_inverse(y.r));
    }

    double newton_tol() const { return newton_tol_; }
    int newton_cap() const { return newton_cap_; }

  private:
    IntMat3 a_;
    Mat3 a_mat_;
    Mat3 a_inv_mat_;
    Spectrum spectrum_;
    PerturbationField p_;
    // Relative to max(1, |y|_sup).  Kept near the rounding floor: inverse
    // orbits lose roughly one digit per two steps to the backward
    // amplification, so slack here directly erodes deep bundle pushes.
    double newton_tol_ = 3e-14;
    int newton_cap_ = 50;
};

// A map together with an iteration direction.  Tags always name the
// foliations of the underlying forward map; the backward view is how the
// contracting foliation is handed to leaf-growth machinery, which then
// sees W^s as a one-dimensional expanding foliation of f^{-1}.
class MapView {
  public:
    MapView(const AnosovMap& m, bool backward) : map_(&m), backward_(backward) {}

    static MapView forward(const AnosovMap& m) { return MapView(m, false); }
    static MapView backward(const AnosovMap& m) { return MapView(m, true); }

    const AnosovMap& map() const { return *map_; }
    bool is_backward() const { return backward_; }
    MapView reversed() const { return MapView(*map_, !backward_); }

    Vec3 lift_apply(const Vec3& x) const {
        return backward_ ? map_->lift_inverse(x) : map_->lift_apply(x);
    }
    TorusPoint apply(const TorusPoint& x) const {
        return backward_ ? map_->inverse_apply(x) : map_->apply(x);
    }
    Vec3 lift_invert(const Vec3& x) const {
        return backward_ ? map_->lift_apply(x) : map_->lift_inverse(x);
    }
    TorusPoint invert(const TorusPoint& x) const {
        return backward_ ? map_->apply(x) : map_->inverse_apply(x);
    }

    // Derivative of the view's one-step map at x.
    Mat3 step_jacobian(const TorusPoint& x) const {
        if (!backward_) return map_->jacobian(x);
        return inverse(map_->jacobian(map_->inverse_apply(x)));
    }

    // Eigen-rate of the view dynamics along a tag (for the linear part).
    double leaf_rate(Tag t) const {
        double a = std::abs(map_->spectrum().alpha_of(t));
        return backward_ ? 1.0 / a : a;
    }

    bool expanding(Tag t) const {
        return backward_ ? (t == Tag::s) : (t == Tag::uu || t == Tag::wu);
    }

  private:
    const AnosovMap* map_;
    bool backward_;
};

}  // namespace anosov
