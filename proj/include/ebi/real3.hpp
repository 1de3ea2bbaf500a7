#pragma once

#include <array>
#include <cmath>

#include "ebi/eig.hpp"
#include "ebi/matrix.hpp"

namespace ebi {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline Vec3 normalized(const Vec3& a) {
    const double n = norm(a);
    return n > 0 ? (1.0 / n) * a : Vec3{1.0, 0.0, 0.0};
}

inline Mat3 mat3_zero() { return {{{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}}; }
inline Mat3 mat3_identity() { return {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}; }
inline Mat3 mat3_diag(double a, double b, double c) { return {{{a, 0, 0}, {0, b, 0}, {0, 0, c}}}; }

inline Mat3 operator*(const Mat3& a, const Mat3& b) {
    Mat3 c = mat3_zero();
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k)
            for (int j = 0; j < 3; ++j) c[i][j] += a[i][k] * b[k][j];
    return c;
}
inline Vec3 operator*(const Mat3& a, const Vec3& v) {
    Vec3 r{0, 0, 0};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r[i] += a[i][j] * v[j];
    return r;
}
inline Mat3 operator+(const Mat3& a, const Mat3& b) {
    Mat3 c;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) c[i][j] = a[i][j] + b[i][j];
    return c;
}
inline Mat3 operator-(const Mat3& a, const Mat3& b) {
    Mat3 c;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) c[i][j] = a[i][j] - b[i][j];
    return c;
}
inline Mat3 operator*(double s, const Mat3& a) {
    Mat3 c;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) c[i][j] = s * a[i][j];
    return c;
}
inline Mat3 transposed(const Mat3& a) {
    Mat3 c;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) c[i][j] = a[j][i];
    return c;
}
inline double det3(const Mat3& m) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}
inline double mat3_maxabs(const Mat3& m) {
    double x = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) x = std::max(x, std::abs(m[i][j]));
    return x;
}
inline double frobenius3(const Mat3& m) {
    double s = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) s += m[i][j] * m[i][j];
    return std::sqrt(s);
}

inline Matrix to_matrix(const Mat3& m) {
    Matrix r(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r(i, j) = m[i][j];
    return r;
}

/// Rodrigues rotation: exp of the cross-product matrix of w.
inline Mat3 so3_exp(const Vec3& w) {
    const double th = norm(w);
    if (th < 1e-300) return mat3_identity();
    const Vec3 k = (1.0 / th) * w;
    const double c = std::cos(th), s = std::sin(th);
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r[i][j] = (i == j ? c : 0.0) + (1 - c) * k[i] * k[j];
    r[0][1] += -s * k[2]; r[0][2] += s * k[1];
    r[1][0] += s * k[2];  r[1][2] += -s * k[0];
    r[2][0] += -s * k[1]; r[2][1] += s * k[0];
    return r;
}

/// Singular values of a real 3x3 matrix, descending.
inline std::array<double, 3> singular_values3(const Mat3& m) {
    const std::vector<double> sv = singular_values(to_matrix(m));
    return {sv[0], sv[1], sv[2]};
}

inline double trace_norm3(const Mat3& m) {
    const auto sv = singular_values3(m);
    return sv[0] + sv[1] + sv[2];
}
inline double spectral_norm3(const Mat3& m) { return singular_values3(m)[0]; }
inline double frobenius_norm3(const Mat3& m) { return frobenius3(m); }

}  // namespace ebi
