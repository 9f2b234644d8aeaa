#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <string>

#include "ffmono/errors.hpp"

namespace ffmono {

inline constexpr double two_pi = 6.283185307179586476925286766559;
inline constexpr double pi = 3.1415926535897932384626433832795;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }
inline double dist(const Vec2& a, const Vec2& b) { return norm(a - b); }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

// Angle reduced to [0, 2*pi).
inline double reduce_angle(double a) {
    double r = std::fmod(a, two_pi);
    if (r < 0.0) r += two_pi;
    // fmod can return two_pi-eps rounding to two_pi after +; clamp. The +0.0
    // also normalizes -0.0.
    if (r >= two_pi) r = 0.0;
    return r + 0.0;
}

// Signed distance of b to the nearest representative of a modulo 2*pi.
inline double angle_gap(double a, double b) {
    double d = std::fmod(b - a, two_pi);
    if (d > pi) d -= two_pi;
    if (d < -pi) d += two_pi;
    return d;
}

// Distance from p to the segment [a, b].
inline double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) return dist(p, a);
    double t = dot(p - a, ab) / len2;
    t = std::fmax(0.0, std::fmin(1.0, t));
    return dist(p, a + ab * t);
}

// ---------------------------------------------------------------------------
// Small integer matrices (period-lattice holonomy lives in GL(2,Z)).

struct Mat2i {
    long long m[2][2] = {{1, 0}, {0, 1}};

    static Mat2i identity() { return {}; }
    static Mat2i shear(long long k) { return {{{1, k}, {0, 1}}}; }

    long long det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
    long long trace() const { return m[0][0] + m[1][1]; }

    Mat2i operator*(const Mat2i& o) const {
        Mat2i r;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                r.m[i][j] = m[i][0] * o.m[0][j] + m[i][1] * o.m[1][j];
        return r;
    }
    bool operator==(const Mat2i& o) const {
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                if (m[i][j] != o.m[i][j]) return false;
        return true;
    }

    // Inverse of a unimodular matrix (|det| = 1).
    Mat2i inverse() const {
        const long long d = det();
        if (d != 1 && d != -1)
            throw not_unimodular("Mat2i::inverse: determinant is " + std::to_string(d));
        Mat2i r;
        r.m[0][0] = d * m[1][1];
        r.m[0][1] = -d * m[0][1];
        r.m[1][0] = -d * m[1][0];
        r.m[1][1] = d * m[0][0];
        return r;
    }

    std::string str() const {
        return "[[" + std::to_string(m[0][0]) + "," + std::to_string(m[0][1]) +
               "],[" + std::to_string(m[1][0]) + "," + std::to_string(m[1][1]) + "]]";
    }
};

// If mat lies in the unipotent class [[1,k],[0,1]] up to integer conjugacy,
// return |k| (trace 2, det 1 and (M-I)^2 = 0; |k| is the gcd of M-I).
// Returns false for anything else.
inline bool unipotent_class(const Mat2i& mat, long long* k_out) {
    if (mat.det() != 1 || mat.trace() != 2) return false;
    const long long p = mat.m[0][0] - 1, q = mat.m[0][1];
    const long long r = mat.m[1][0], s = mat.m[1][1] - 1;
    // (M - I)^2 = 0 given trace(M-I) = 0 and det(M-I) = 0.
    if (p * s - q * r != 0) return false;
    long long g = std::gcd(std::gcd(std::llabs(p), std::llabs(q)), std::llabs(r));
    if (k_out) *k_out = g;
    return true;
}

struct Mat3i {
    long long m[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    long long det() const {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
               m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    }
    bool operator==(const Mat3i& o) const {
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (m[i][j] != o.m[i][j]) return false;
        return true;
    }
};

// ---------------------------------------------------------------------------
// Dense 4x4 helpers for linearized fields at singular points.

using Mat4 = std::array<std::array<double, 4>, 4>;

inline Mat4 mat4_zero() { return {{{0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}}}; }

inline Mat4 operator*(const Mat4& a, const Mat4& b) {
    Mat4 r = mat4_zero();
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k) {
            const double aik = a[i][k];
            if (aik == 0.0) continue;
            for (int j = 0; j < 4; ++j) r[i][j] += aik * b[k][j];
        }
    return r;
}

inline Mat4 operator+(const Mat4& a, const Mat4& b) {
    Mat4 r = mat4_zero();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r[i][j] = a[i][j] + b[i][j];
    return r;
}

inline Mat4 operator*(double s, const Mat4& a) {
    Mat4 r = mat4_zero();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r[i][j] = s * a[i][j];
    return r;
}

inline double trace(const Mat4& a) { return a[0][0] + a[1][1] + a[2][2] + a[3][3]; }

inline double frobenius(const Mat4& a) {
    double s = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) s += a[i][j] * a[i][j];
    return std::sqrt(s);
}

double det4(const Mat4& a);

// Canonical pairs are interleaved: coords = (q1, p1, q2, p2). Multiplying a
// Hessian by this matrix on the left gives the linearized Hamiltonian field.
inline Mat4 symplectic_j() {
    Mat4 j = mat4_zero();
    j[0][1] = 1.0;
    j[1][0] = -1.0;
    j[2][3] = 1.0;
    j[3][2] = -1.0;
    return j;
}

// ---------------------------------------------------------------------------
// Lagrange (Gauss) reduction of a planar lattice basis.
// Returns a reduced basis spanning the same lattice.

inline void lattice_reduce(Vec2& g1, Vec2& g2) {
    if (norm(g1) > norm(g2)) std::swap(g1, g2);
    for (int it = 0; it < 64; ++it) {
        const double mu = dot(g2, g1) / dot(g1, g1);
        const double r = std::round(mu);
        g2 = g2 - g1 * r;
        if (norm(g2) >= norm(g1)) break;
        std::swap(g1, g2);
    }
}

}  // namespace ffmono
