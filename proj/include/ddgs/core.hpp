#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ddgs {

struct Vec2 {
    double x = 0.0, y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::sqrt(x * x + y * y); }
};

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
    Vec3 normalized() const {
        double n = norm();
        if (n == 0.0) throw std::invalid_argument("cannot normalize zero vector");
        return {x / n, y / n, z / n};
    }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }
inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

// Row-major 2x2, symmetric use is common so helpers assume nothing.
struct Mat2 {
    double m00 = 0, m01 = 0, m10 = 0, m11 = 0;

    static Mat2 identity() { return {1, 0, 0, 1}; }
    double det() const { return m00 * m11 - m01 * m10; }
    Mat2 inverse() const {
        double d = det();
        if (d == 0.0) throw std::runtime_error("singular 2x2 matrix");
        return {m11 / d, -m01 / d, -m10 / d, m00 / d};
    }
    Vec2 operator*(const Vec2& v) const { return {m00 * v.x + m01 * v.y, m10 * v.x + m11 * v.y}; }
    Mat2 operator*(const Mat2& o) const {
        return {m00 * o.m00 + m01 * o.m10, m00 * o.m01 + m01 * o.m11,
                m10 * o.m00 + m11 * o.m10, m10 * o.m01 + m11 * o.m11};
    }
    Mat2 operator+(const Mat2& o) const { return {m00 + o.m00, m01 + o.m01, m10 + o.m10, m11 + o.m11}; }
    Mat2 operator*(double s) const { return {m00 * s, m01 * s, m10 * s, m11 * s}; }
    Mat2 transposed() const { return {m00, m10, m01, m11}; }
    // Largest eigenvalue of a symmetric 2x2.
    double max_eigenvalue_sym() const {
        double tr = m00 + m11;
        double d = det();
        double disc = std::sqrt(std::max(0.0, tr * tr * 0.25 - d));
        return tr * 0.5 + disc;
    }
};

// Row-major 3x3.
struct Mat3 {
    std::array<double, 9> a{};  // a[3*r + c]

    static Mat3 identity() {
        Mat3 m;
        m.a = {1, 0, 0, 0, 1, 0, 0, 0, 1};
        return m;
    }
    static Mat3 zero() { return Mat3{}; }
    static Mat3 diag(const Vec3& d) {
        Mat3 m;
        m.a = {d.x, 0, 0, 0, d.y, 0, 0, 0, d.z};
        return m;
    }
    static Mat3 skew(const Vec3& w) {
        Mat3 m;
        m.a = {0, -w.z, w.y, w.z, 0, -w.x, -w.y, w.x, 0};
        return m;
    }
    static Mat3 outer(const Vec3& u, const Vec3& v) {
        Mat3 m;
        m.a = {u.x * v.x, u.x * v.y, u.x * v.z,
               u.y * v.x, u.y * v.y, u.y * v.z,
               u.z * v.x, u.z * v.y, u.z * v.z};
        return m;
    }

    double operator()(int r, int c) const { return a[3 * r + c]; }
    double& operator()(int r, int c) { return a[3 * r + c]; }

    Vec3 operator*(const Vec3& v) const {
        return {a[0] * v.x + a[1] * v.y + a[2] * v.z,
                a[3] * v.x + a[4] * v.y + a[5] * v.z,
                a[6] * v.x + a[7] * v.y + a[8] * v.z};
    }
    Mat3 operator*(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0;
                for (int k = 0; k < 3; ++k) s += (*this)(i, k) * o(k, j);
                r(i, j) = s;
            }
        return r;
    }
    Mat3 operator+(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 9; ++i) r.a[i] = a[i] + o.a[i];
        return r;
    }
    Mat3 operator*(double s) const {
        Mat3 r;
        for (int i = 0; i < 9; ++i) r.a[i] = a[i] * s;
        return r;
    }
    Mat3 transposed() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
        return r;
    }
    Vec3 row(int i) const { return {a[3 * i], a[3 * i + 1], a[3 * i + 2]}; }
    Vec3 col(int j) const { return {a[j], a[3 + j], a[6 + j]}; }
    double trace() const { return a[0] + a[4] + a[8]; }
};

// Unit quaternion, (w, x, y, z) order.
struct Quat {
    double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

    Quat() = default;
    Quat(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}

    static Quat identity() { return {1, 0, 0, 0}; }

    double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }
    Quat normalized() const {
        double n = norm();
        if (n == 0.0) throw std::invalid_argument("cannot normalize zero quaternion");
        return {w / n, x / n, y / n, z / n};
    }
    Quat conjugate() const { return {w, -x, -y, -z}; }
    Quat operator*(const Quat& o) const {
        return {w * o.w - x * o.x - y * o.y - z * o.z,
                w * o.x + x * o.w + y * o.z - z * o.y,
                w * o.y - x * o.z + y * o.w + z * o.x,
                w * o.z + x * o.y - y * o.x + z * o.w};
    }

    Mat3 to_matrix() const {
        double ww = w * w, xx = x * x, yy = y * y, zz = z * z;
        double n2 = ww + xx + yy + zz;
        double s = n2 > 0 ? 2.0 / n2 : 0.0;
        Mat3 m;
        m.a = {1 - s * (yy + zz), s * (x * y - w * z), s * (x * z + w * y),
               s * (x * y + w * z), 1 - s * (xx + zz), s * (y * z - w * x),
               s * (x * z - w * y), s * (y * z + w * x), 1 - s * (xx + yy)};
        return m;
    }

    // Axis-angle (rotation vector) exponential map.
    static Quat from_rotvec(const Vec3& r) {
        double angle = r.norm();
        if (angle < 1e-12) {
            // first-order expansion near identity
            Quat q{1.0, 0.5 * r.x, 0.5 * r.y, 0.5 * r.z};
            return q.normalized();
        }
        double h = 0.5 * angle;
        double s = std::sin(h) / angle;
        return {std::cos(h), r.x * s, r.y * s, r.z * s};
    }

    // Rotation angle in radians, in [0, pi].
    double angle() const {
        double c = std::abs(w) / norm();
        c = std::min(1.0, c);
        return 2.0 * std::acos(c);
    }
};

constexpr double kPi = 3.14159265358979323846;

inline bool all_finite(const std::vector<double>& v) {
    for (double d : v)
        if (!std::isfinite(d)) return false;
    return true;
}

inline double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

inline double sigmoid(double x) {
    if (x >= 0) {
        double e = std::exp(-x);
        return 1.0 / (1.0 + e);
    }
    double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace ddgs
