#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace scirs {

/// Dense 3x3 real matrix, zero-based row-major indexing.
struct Matrix3 {
    std::array<std::array<double, 3>, 3> a{};

    double& operator()(int i, int j) { return a[i][j]; }
    double operator()(int i, int j) const { return a[i][j]; }

    static Matrix3 identity() { return diagonal({1.0, 1.0, 1.0}); }

    static Matrix3 diagonal(const std::array<double, 3>& d) {
        Matrix3 m;
        for (int i = 0; i < 3; ++i) m(i, i) = d[i];
        return m;
    }

    bool operator==(const Matrix3&) const = default;
};

inline Matrix3 operator*(const Matrix3& x, const Matrix3& y) {
    Matrix3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) r(i, j) += x(i, k) * y(k, j);
    return r;
}

inline Matrix3 operator+(const Matrix3& x, const Matrix3& y) {
    Matrix3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r(i, j) = x(i, j) + y(i, j);
    return r;
}

inline Matrix3 operator*(double s, const Matrix3& x) {
    Matrix3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r(i, j) = s * x(i, j);
    return r;
}

inline Matrix3 transpose(const Matrix3& x) {
    Matrix3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r(i, j) = x(j, i);
    return r;
}

inline double trace(const Matrix3& x) { return x(0, 0) + x(1, 1) + x(2, 2); }

inline double det(const Matrix3& x) {
    return x(0, 0) * (x(1, 1) * x(2, 2) - x(1, 2) * x(2, 1)) -
           x(0, 1) * (x(1, 0) * x(2, 2) - x(1, 2) * x(2, 0)) +
           x(0, 2) * (x(1, 0) * x(2, 1) - x(1, 1) * x(2, 0));
}

inline double max_abs_entry(const Matrix3& x) {
    double m = 0.0;
    for (const auto& row : x.a)
        for (double v : row) m = std::max(m, std::abs(v));
    return m;
}

/// Row vector times matrix times column vector: x M x^T.
inline double quadratic_form(const Matrix3& m, const std::array<double, 3>& x) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) s += x[i] * m(i, j) * x[j];
    return s;
}

/// m D + D m^T for D = diag(d).
inline Matrix3 diagonal_lyapunov_sum(const Matrix3& m, const std::array<double, 3>& d) {
    const Matrix3 dm = Matrix3::diagonal(d);
    return m * dm + dm * transpose(m);
}

/// Eigenvalues of a symmetric matrix in ascending order (trigonometric closed
/// form; only the upper triangle is read).
inline std::array<double, 3> symmetric_eigenvalues(const Matrix3& s) {
    const double p1 = s(0, 1) * s(0, 1) + s(0, 2) * s(0, 2) + s(1, 2) * s(1, 2);
    if (p1 == 0.0) {
        std::array<double, 3> e = {s(0, 0), s(1, 1), s(2, 2)};
        std::sort(e.begin(), e.end());
        return e;
    }
    const double q = trace(s) / 3.0;
    const double p2 = (s(0, 0) - q) * (s(0, 0) - q) + (s(1, 1) - q) * (s(1, 1) - q) +
                      (s(2, 2) - q) * (s(2, 2) - q) + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    Matrix3 b = s;
    for (int i = 0; i < 3; ++i) b(i, i) -= q;
    b(1, 0) = b(0, 1);
    b(2, 0) = b(0, 2);
    b(2, 1) = b(1, 2);
    const double r = std::clamp(det((1.0 / p) * b) / 2.0, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    const double hi = q + 2.0 * p * std::cos(phi);
    const double lo = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
    return {lo, 3.0 * q - hi - lo, hi};
}

}  // namespace scirs
