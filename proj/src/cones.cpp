#include "anosov/cones.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "anosov/errors.hpp"

namespace anosov {
namespace {

// Eigen-decomposition of a symmetric 3x3 matrix by cyclic Jacobi
// rotations.  Used to locate interior critical points of |Dv|^2 on the
// unit sphere.
struct SymEigen {
    double value[3];
    Vec3 vector[3];
};

SymEigen sym_eigen(Mat3 a) {
    Mat3 v = Mat3::identity();
    for (int sweep = 0; sweep < 32; ++sweep) {
        double off = std::abs(a.m[0][1]) + std::abs(a.m[0][2]) + std::abs(a.m[1][2]);
        if (off < 1e-15) break;
        for (int p = 0; p < 2; ++p)
            for (int q = p + 1; q < 3; ++q) {
                if (std::abs(a.m[p][q]) < 1e-18) continue;
                double theta = (a.m[q][q] - a.m[p][p]) / (2.0 * a.m[p][q]);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                Mat3 r = Mat3::identity();
                r.m[p][p] = c; r.m[q][q] = c; r.m[p][q] = s; r.m[q][p] = -s;
                a = transpose(r) * a * r;
                v = v * r;
            }
    }
    SymEigen e;
    for (int i = 0; i < 3; ++i) {
        e.value[i] = a.m[i][i];
        e.vector[i] = normalized(v.col(i));
    }
    return e;
}

struct Frame {
    Vec3 axis, e1, e2;  // orthonormal, axis = cone axis
};

Frame make_frame(const Vec3& axis) {
    Vec3 a = normalized(axis);
    Vec3 h = std::abs(a.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    Vec3 e1 = normalized(cross(a, h));
    Vec3 e2 = cross(a, e1);
    return {a, e1, e2};
}

struct TrigTable {
    std::vector<double> c, s;
    explicit TrigTable(int n) : c(n), s(n) {
        for (int i = 0; i < n; ++i) {
            double psi = kTwoPi * double(i) / double(n);
            c[i] = std::cos(psi);
            s[i] = std::sin(psi);
        }
    }
};

struct ConeSweep {
    double grow_min = 1e300, grow_max = 0.0;
    double worst_angle = 0.0;  // image angle against the target
};

enum class Target { axis_line, plane_band, none };

// Extremes of |Dv| over a line cone of half-angle theta around `axis`,
// plus the worst image angle of Dv against the target (the axis line, or
// the plane with unit normal `normal`).
ConeSweep sweep_line_cone(const Mat3& d, const Vec3& axis, double theta, Target target,
                          const Vec3& target_axis_or_normal, const TrigTable& tab,
                          const SymEigen& crit) {
    Frame f = make_frame(axis);
    ConeSweep out;
    const double ct = std::cos(theta), st = std::sin(theta);
    Vec3 da = d * f.axis, d1 = d * f.e1, d2 = d * f.e2;

    auto visit = [&](const Vec3& image) {
        double n2 = dot(image, image);
        double n = std::sqrt(n2);
        out.grow_min = std::min(out.grow_min, n);
        out.grow_max = std::max(out.grow_max, n);
        if (target == Target::axis_line) {
            out.worst_angle = std::max(out.worst_angle, line_angle(image, target_axis_or_normal));
        } else if (target == Target::plane_band) {
            double s = std::abs(dot(image, target_axis_or_normal)) / n;
            out.worst_angle = std::max(out.worst_angle, std::asin(std::min(s, 1.0)));
        }
    };

    visit(da);  // cone center
    for (std::size_t i = 0; i < tab.c.size(); ++i)
        visit(da * ct + (d1 * tab.c[i] + d2 * tab.s[i]) * st);
    // Interior critical points of |Dv|^2 that happen to lie in the cone.
    for (int i = 0; i < 3; ++i)
        if (line_angle(crit.vector[i], f.axis) <= theta) visit(d * crit.vector[i]);
    return out;
}

// Extremes over the band  { v : angle(v, plane) <= theta }  around the
// plane spanned by (u1, u2) with unit normal `normal`.
ConeSweep sweep_plane_band(const Mat3& d, const Vec3& u1, const Vec3& u2, const Vec3& normal,
                           double theta, const Vec3& image_normal, const TrigTable& tab,
                           const SymEigen& crit) {
    ConeSweep out;
    const double ct = std::cos(theta), st = std::sin(theta);
    Vec3 b1 = normalized(u1);
    Vec3 b2 = normalized(u2 - b1 * dot(u2, b1));
    Vec3 d1 = d * b1, d2 = d * b2, dn = d * normal;

    auto visit = [&](const Vec3& image) {
        double n = norm(image);
        out.grow_min = std::min(out.grow_min, n);
        out.grow_max = std::max(out.grow_max, n);
        double s = std::abs(dot(image, image_normal)) / n;
        out.worst_angle = std::max(out.worst_angle, std::asin(std::min(s, 1.0)));
    };

    // Boundary circle at angle theta off the plane (the opposite circle
    // is its reflection v -> -v) and the great circle inside the plane.
    for (std::size_t i = 0; i < tab.c.size(); ++i) {
        Vec3 in_plane = d1 * tab.c[i] + d2 * tab.s[i];
        visit(in_plane * ct + dn * st);
        visit(in_plane);
    }
    for (int i = 0; i < 3; ++i) {
        double off = std::abs(dot(crit.vector[i], normal));
        if (std::asin(std::min(off, 1.0)) <= theta) visit(d * crit.vector[i]);
    }
    return out;
}

}  // namespace

ConeCertificate verify_cone_condition(const AnosovMap& map, const ConeRequest& request) {
    const Spectrum& sp = map.spectrum();
    const Vec3 v_uu = sp.dir(Tag::uu), v_wu = sp.dir(Tag::wu), v_s = sp.dir(Tag::s);
    const Vec3 plane_normal = normalized(cross(v_uu, v_wu));
    const TrigTable tab(request.boundary_samples);
    const int n = request.grid_n;

    ConeCertificate cert;
    cert.request = request;
    cert.plane_expansion_min = 1e300;
    cert.uu_expansion_min = 1e300;
    cert.center_expansion_min = 1e300;
    cert.s_inv_expansion_min = 1e300;
    double plane_worst_angle = 0, uu_worst_angle = 0, s_worst_angle = 0;
    Vec3 worst_point{0, 0, 0};
    double worst_gamma = 0;

    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                Vec3 x{double(i) / n, double(j) / n, double(k) / n};
                Mat3 d = map.jacobian(x);
                Mat3 dinv = inverse(d);
                SymEigen crit_f = sym_eigen(transpose(d) * d);
                SymEigen crit_b = sym_eigen(transpose(dinv) * dinv);

                ConeSweep plane = sweep_plane_band(d, v_uu, v_wu, plane_normal,
                                                   request.theta_plane, plane_normal, tab, crit_f);
                ConeSweep uu = sweep_line_cone(d, v_uu, request.theta_uu, Target::axis_line,
                                               v_uu, tab, crit_f);
                ConeSweep center = sweep_line_cone(d, v_wu, request.theta_center, Target::none,
                                                   v_wu, tab, crit_f);
                ConeSweep s_inv = sweep_line_cone(dinv, v_s, request.theta_s, Target::axis_line,
                                                  v_s, tab, crit_b);
                ConeSweep center_inv = sweep_line_cone(dinv, v_wu, request.theta_center,
                                                       Target::none, v_wu, tab, crit_b);

                cert.plane_expansion_min = std::min(cert.plane_expansion_min, plane.grow_min);
                plane_worst_angle = std::max(plane_worst_angle, plane.worst_angle);
                cert.uu_expansion_min = std::min(cert.uu_expansion_min, uu.grow_min);
                cert.uu_expansion_max = std::max(cert.uu_expansion_max, uu.grow_max);
                uu_worst_angle = std::max(uu_worst_angle, uu.worst_angle);
                cert.center_expansion_min = std::min(cert.center_expansion_min, center.grow_min);
                cert.center_expansion_max = std::max(cert.center_expansion_max, center.grow_max);
                cert.s_inv_expansion_min = std::min(cert.s_inv_expansion_min, s_inv.grow_min);
                cert.s_inv_expansion_max = std::max(cert.s_inv_expansion_max, s_inv.grow_max);
                s_worst_angle = std::max(s_worst_angle, s_inv.worst_angle);
                cert.center_inv_expansion_max =
                    std::max(cert.center_inv_expansion_max, center_inv.grow_max);

                double gf = center.grow_max / uu.grow_min;
                double gb = center_inv.grow_max / s_inv.grow_min;
                cert.gamma_forward = std::max(cert.gamma_forward, gf);
                cert.gamma_backward = std::max(cert.gamma_backward, gb);
                if (std::max(gf, gb) > worst_gamma) {
                    worst_gamma = std::max(gf, gb);
                    worst_point = x;
                }
            }

    cert.plane_angle_margin = request.theta_plane - plane_worst_angle;
    cert.uu_angle_margin = request.theta_uu - uu_worst_angle;
    cert.s_angle_margin = request.theta_s - s_worst_angle;
    cert.gamma = std::max(cert.gamma_forward, cert.gamma_backward);

    auto fail = [&](const std::string& what, double value) {
        std::ostringstream os;
        os << "cone verification failed: " << what << " = " << value << " at grid near ("
           << worst_point.x << ", " << worst_point.y << ", " << worst_point.z << ")";
        throw ConeViolation(os.str());
    };

    // A zero-angle request is admitted when images stay on the axis or
    // plane to machine precision (the unperturbed linear case).
    auto strict_inside = [](double worst, double theta) {
        return worst < theta || worst < 1e-12;
    };

    if (!(cert.plane_expansion_min > 1.0))
        fail("min expansion on the unstable-plane cone", cert.plane_expansion_min);
    if (!strict_inside(plane_worst_angle, request.theta_plane))
        fail("plane cone image angle", plane_worst_angle);
    if (!(cert.uu_expansion_min > 1.0))
        fail("min expansion on the strong-unstable cone", cert.uu_expansion_min);
    if (!strict_inside(uu_worst_angle, request.theta_uu))
        fail("strong cone image angle", uu_worst_angle);
    if (!(cert.s_inv_expansion_min > 1.0))
        fail("min inverse expansion on the stable cone", cert.s_inv_expansion_min);
    if (!strict_inside(s_worst_angle, request.theta_s))
        fail("stable cone image angle", s_worst_angle);
    if (!(cert.gamma < 1.0)) fail("domination ratio", cert.gamma);
    return cert;
}

}  // namespace anosov
