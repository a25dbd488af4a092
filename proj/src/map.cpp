#include "anosov/map.hpp"

#include <cmath>
#include <string>

#include "anosov/errors.hpp"

namespace anosov {

Vec3 AnosovMap::lift_inverse(const Vec3& y) const {
    Vec3 x = a_inv_mat_ * y;
    if (p_.trivial()) return x;
    const double scale = std::max({1.0, std::abs(y.x), std::abs(y.y), std::abs(y.z)});
    const double tol = newton_tol_ * scale;
    for (int it = 0; it < newton_cap_; ++it) {
        Vec3 r = lift_apply(x) - y;
        double rn = std::max({std::abs(r.x), std::abs(r.y), std::abs(r.z)});
        if (rn <= tol) return x;
        x -= solve(jacobian(x), r);
    }
    Vec3 r = lift_apply(x) - y;
    double rn = std::max({std::abs(r.x), std::abs(r.y), std::abs(r.z)});
    if (rn <= tol) return x;
    throw NonConvergence("lift_inverse: Newton residual " + std::to_string(rn) +
                         " after " + std::to_string(newton_cap_) + " iterations");
}

}  // namespace anosov
