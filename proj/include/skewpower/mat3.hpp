#pragma once

#include <array>
#include <cmath>

#include "skewpower/errors.hpp"

namespace skewpower {

struct Vec3 {
    std::array<double, 3> v{0.0, 0.0, 0.0};

    double& operator[](int i) { return v[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return v[static_cast<std::size_t>(i)]; }

    double norm() const { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }
};

/// Small fixed-size matrix used for the (location, scale, skewness) blocks.
struct Mat3 {
    // row-major
    std::array<double, 9> m{0, 0, 0, 0, 0, 0, 0, 0, 0};

    static Mat3 identity() {
        Mat3 r;
        r(0, 0) = r(1, 1) = r(2, 2) = 1.0;
        return r;
    }

    double& operator()(int i, int j) { return m[static_cast<std::size_t>(3 * i + j)]; }
    double operator()(int i, int j) const { return m[static_cast<std::size_t>(3 * i + j)]; }

    Mat3 scaled(double c) const {
        Mat3 r = *this;
        for (auto& x : r.m) x *= c;
        return r;
    }

    double det() const {
        const Mat3& a = *this;
        return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
             - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
             + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
    }

    /// Inverse by adjugate; throws when the matrix is numerically singular.
    Mat3 inverse() const {
        const Mat3& a = *this;
        const double d = det();
        double scale = 0.0;
        for (double x : m) scale = std::max(scale, std::fabs(x));
        if (!(std::fabs(d) > 1e-14 * scale * scale * scale) || !std::isfinite(d))
            throw numeric_error("3x3 matrix is singular or ill-conditioned");
        Mat3 r;
        r(0, 0) = (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) / d;
        r(0, 1) = (a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2)) / d;
        r(0, 2) = (a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1)) / d;
        r(1, 0) = (a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2)) / d;
        r(1, 1) = (a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0)) / d;
        r(1, 2) = (a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2)) / d;
        r(2, 0) = (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0)) / d;
        r(2, 1) = (a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1)) / d;
        r(2, 2) = (a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0)) / d;
        return r;
    }

    Vec3 operator*(const Vec3& x) const {
        Vec3 r;
        for (int i = 0; i < 3; ++i)
            r[i] = (*this)(i, 0) * x[0] + (*this)(i, 1) * x[1] + (*this)(i, 2) * x[2];
        return r;
    }

    Mat3 operator*(const Mat3& b) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0.0;
                for (int k = 0; k < 3; ++k) s += (*this)(i, k) * b(k, j);
                r(i, j) = s;
            }
        return r;
    }

    double max_abs() const {
        double r = 0.0;
        for (double x : m) r = std::max(r, std::fabs(x));
        return r;
    }

    double max_asymmetry() const {
        const Mat3& a = *this;
        double r = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) r = std::max(r, std::fabs(a(i, j) - a(j, i)));
        return r;
    }

    Mat3 symmetrized() const {
        Mat3 r = *this;
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) {
                const double s = 0.5 * (r(i, j) + r(j, i));
                r(i, j) = r(j, i) = s;
            }
        return r;
    }
};

inline double quadratic_form(const Vec3& x, const Mat3& a) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) s += x[i] * a(i, j) * x[j];
    return s;
}

} // namespace skewpower
