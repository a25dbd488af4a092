#pragma once

// Plain 3-vector / 3x3-matrix arithmetic and the flat torus T^3 = R^3/Z^3.
// Everything here is small enough that hand-rolled kernels beat a general
// linear algebra dependency; the dedicated unit tests compare against
// finite-difference and brute-force oracles.

#include <array>
#include <cmath>
#include <cstdint>

#include "anosov/errors.hpp"

namespace anosov {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
    bool operator==(const Vec3& o) const { return x == o.x && y == o.y && z == o.z; }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline Vec3 normalized(const Vec3& v) {
    double n = norm(v);
    if (n == 0.0) throw Error("normalized: zero vector");
    return v / n;
}

// Angle between lines spanned by a and b (sign of either vector ignored).
// The atan2 form stays accurate down to machine precision for tiny angles,
// where acos of a clamped cosine floors out near sqrt(eps).
inline double line_angle(const Vec3& a, const Vec3& b) {
    return std::atan2(norm(cross(a, b)), std::abs(dot(a, b)));
}

struct Mat3 {
    // Row-major.
    double m[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};

    static Mat3 identity() {
        Mat3 r;
        r.m[0][0] = r.m[1][1] = r.m[2][2] = 1.0;
        return r;
    }

    double& operator()(int i, int j) { return m[i][j]; }
    double operator()(int i, int j) const { return m[i][j]; }

    Vec3 row(int i) const { return {m[i][0], m[i][1], m[i][2]}; }
    Vec3 col(int j) const { return {m[0][j], m[1][j], m[2][j]}; }

    Mat3 operator+(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i][j] = m[i][j] + o.m[i][j];
        return r;
    }
    Mat3 operator-(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i][j] = m[i][j] - o.m[i][j];
        return r;
    }
    Mat3 operator*(double s) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i][j] = m[i][j] * s;
        return r;
    }
};

inline Vec3 operator*(const Mat3& a, const Vec3& v) {
    return {a.m[0][0] * v.x + a.m[0][1] * v.y + a.m[0][2] * v.z,
            a.m[1][0] * v.x + a.m[1][1] * v.y + a.m[1][2] * v.z,
            a.m[2][0] * v.x + a.m[2][1] * v.y + a.m[2][2] * v.z};
}

inline Mat3 operator*(const Mat3& a, const Mat3& b) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0;
            for (int k = 0; k < 3; ++k) s += a.m[i][k] * b.m[k][j];
            r.m[i][j] = s;
        }
    return r;
}

inline Mat3 transpose(const Mat3& a) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = a.m[j][i];
    return r;
}

inline double det(const Mat3& a) {
    return a.m[0][0] * (a.m[1][1] * a.m[2][2] - a.m[1][2] * a.m[2][1]) -
           a.m[0][1] * (a.m[1][0] * a.m[2][2] - a.m[1][2] * a.m[2][0]) +
           a.m[0][2] * (a.m[1][0] * a.m[2][1] - a.m[1][1] * a.m[2][0]);
}

inline Mat3 adjugate(const Mat3& a) {
    Mat3 r;
    r.m[0][0] = a.m[1][1] * a.m[2][2] - a.m[1][2] * a.m[2][1];
    r.m[0][1] = a.m[0][2] * a.m[2][1] - a.m[0][1] * a.m[2][2];
    r.m[0][2] = a.m[0][1] * a.m[1][2] - a.m[0][2] * a.m[1][1];
    r.m[1][0] = a.m[1][2] * a.m[2][0] - a.m[1][0] * a.m[2][2];
    r.m[1][1] = a.m[0][0] * a.m[2][2] - a.m[0][2] * a.m[2][0];
    r.m[1][2] = a.m[0][2] * a.m[1][0] - a.m[0][0] * a.m[1][2];
    r.m[2][0] = a.m[1][0] * a.m[2][1] - a.m[1][1] * a.m[2][0];
    r.m[2][1] = a.m[0][1] * a.m[2][0] - a.m[0][0] * a.m[2][1];
    r.m[2][2] = a.m[0][0] * a.m[1][1] - a.m[0][1] * a.m[1][0];
    return r;
}

inline Mat3 inverse(const Mat3& a) {
    double d = det(a);
    if (std::abs(d) < 1e-14) throw SingularMatrix("inverse: |det| < 1e-14");
    return adjugate(a) * (1.0 / d);
}

inline Vec3 solve(const Mat3& a, const Vec3& b) { return inverse(a) * b; }

// Integer matrix in SL(3,Z) up to sign of the determinant.
struct IntMat3 {
    std::int64_t m[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};

    std::int64_t operator()(int i, int j) const { return m[i][j]; }
    std::int64_t& operator()(int i, int j) { return m[i][j]; }

    std::int64_t trace() const { return m[0][0] + m[1][1] + m[2][2]; }

    std::int64_t det() const {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
               m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    }

    // Sum of the principal 2x2 minors (second elementary symmetric
    // polynomial of the eigenvalues).
    std::int64_t minor_sum() const {
        return (m[1][1] * m[2][2] - m[1][2] * m[2][1]) +
               (m[0][0] * m[2][2] - m[0][2] * m[2][0]) +
               (m[0][0] * m[1][1] - m[0][1] * m[1][0]);
    }

    Mat3 to_mat() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i][j] = double(m[i][j]);
        return r;
    }

    // Exact inverse; valid because |det| = 1.
    IntMat3 unimodular_inverse() const {
        std::int64_t d = det();
        if (d != 1 && d != -1)
            throw SingularMatrix("unimodular_inverse: |det| != 1");
        IntMat3 r;
        r.m[0][0] = d * (m[1][1] * m[2][2] - m[1][2] * m[2][1]);
        r.m[0][1] = d * (m[0][2] * m[2][1] - m[0][1] * m[2][2]);
        r.m[0][2] = d * (m[0][1] * m[1][2] - m[0][2] * m[1][1]);
        r.m[1][0] = d * (m[1][2] * m[2][0] - m[1][0] * m[2][2]);
        r.m[1][1] = d * (m[0][0] * m[2][2] - m[0][2] * m[2][0]);
        r.m[1][2] = d * (m[0][2] * m[1][0] - m[0][0] * m[1][2]);
        r.m[2][0] = d * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        r.m[2][1] = d * (m[0][1] * m[2][0] - m[0][0] * m[2][1]);
        r.m[2][2] = d * (m[0][0] * m[1][1] - m[0][1] * m[1][0]);
        return r;
    }

    bool operator==(const IntMat3& o) const {
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (m[i][j] != o.m[i][j]) return false;
        return true;
    }
};

inline Vec3 operator*(const IntMat3& a, const Vec3& v) { return a.to_mat() * v; }

// Reduces a real number to [0, 1).
inline double mod1(double t) {
    double r = t - std::floor(t);
    if (r >= 1.0) r = 0.0;  // guards against floor rounding at the seam
    return r;
}

// Point on the torus, stored as the reduced representative in [0,1)^3.
struct TorusPoint {
    Vec3 r;

    TorusPoint() = default;
    explicit TorusPoint(const Vec3& lift) : r{mod1(lift.x), mod1(lift.y), mod1(lift.z)} {}
    TorusPoint(double a, double b, double c) : TorusPoint(Vec3{a, b, c}) {}

    bool operator==(const TorusPoint& o) const { return r == o.r; }
};

// Distance of a reduced coordinate difference to the nearest integer.
inline double circle_dist(double a, double b) {
    double d = std::abs(mod1(a) - mod1(b));
    return std::min(d, 1.0 - d);
}

// Flat metric on T^3 (minimum over +-1 shifts in every coordinate).
inline double torus_dist(const TorusPoint& a, const TorusPoint& b) {
    double dx = circle_dist(a.r.x, b.r.x);
    double dy = circle_dist(a.r.y, b.r.y);
    double dz = circle_dist(a.r.z, b.r.z);
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace anosov
