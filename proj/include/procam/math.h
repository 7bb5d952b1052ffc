// Copyright (c) 2026 The procam authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PROCAM_MATH_H
#define PROCAM_MATH_H

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <type_traits>

namespace procam {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kInvPi = 1.0 / std::numbers::pi;

// Forward-mode dual number carrying N directional derivatives. Used to
// take local Jacobians of shading terms; the global accumulation over
// path vertices is done in reverse by the path replay in autodiff.
template <int N>
struct Dual {
    double v = 0.0;
    std::array<double, N> d{};

    constexpr Dual() = default;
    constexpr Dual(double value) : v(value) {}  // NOLINT: implicit by design of the scalar concept

    static Dual variable(double value, int index) {
        Dual r(value);
        r.d[index] = 1.0;
        return r;
    }

    Dual &operator+=(const Dual &o) {
        v += o.v;
        for (int i = 0; i < N; ++i) d[i] += o.d[i];
        return *this;
    }
    Dual &operator-=(const Dual &o) {
        v -= o.v;
        for (int i = 0; i < N; ++i) d[i] -= o.d[i];
        return *this;
    }
    Dual &operator*=(const Dual &o) {
        for (int i = 0; i < N; ++i) d[i] = d[i] * o.v + v * o.d[i];
        v *= o.v;
        return *this;
    }
    Dual &operator/=(const Dual &o) {
        double inv = 1.0 / o.v;
        for (int i = 0; i < N; ++i) d[i] = (d[i] - v * inv * o.d[i]) * inv;
        v *= inv;
        return *this;
    }
};

template <int N> Dual<N> operator+(Dual<N> a, const Dual<N> &b) { return a += b; }
template <int N> Dual<N> operator-(Dual<N> a, const Dual<N> &b) { return a -= b; }
template <int N> Dual<N> operator*(Dual<N> a, const Dual<N> &b) { return a *= b; }
template <int N> Dual<N> operator/(Dual<N> a, const Dual<N> &b) { return a /= b; }
template <int N> Dual<N> operator+(Dual<N> a, double b) { a.v += b; return a; }
template <int N> Dual<N> operator+(double a, Dual<N> b) { b.v += a; return b; }
template <int N> Dual<N> operator-(Dual<N> a, double b) { a.v -= b; return a; }
template <int N> Dual<N> operator-(double a, const Dual<N> &b) { return Dual<N>(a) - b; }
template <int N> Dual<N> operator*(Dual<N> a, double b) {
    a.v *= b;
    for (auto &x : a.d) x *= b;
    return a;
}
template <int N> Dual<N> operator*(double a, Dual<N> b) { return b * a; }
template <int N> Dual<N> operator/(Dual<N> a, double b) { return a * (1.0 / b); }
template <int N> Dual<N> operator/(double a, const Dual<N> &b) { return Dual<N>(a) / b; }
template <int N> Dual<N> operator-(Dual<N> a) {
    a.v = -a.v;
    for (auto &x : a.d) x = -x;
    return a;
}

template <int N> bool operator<(const Dual<N> &a, const Dual<N> &b) { return a.v < b.v; }
template <int N> bool operator>(const Dual<N> &a, const Dual<N> &b) { return a.v > b.v; }
template <int N> bool operator<(const Dual<N> &a, double b) { return a.v < b; }
template <int N> bool operator>(const Dual<N> &a, double b) { return a.v > b; }
template <int N> bool operator<=(const Dual<N> &a, double b) { return a.v <= b; }
template <int N> bool operator>=(const Dual<N> &a, double b) { return a.v >= b; }

namespace detail {
template <int N> Dual<N> chain(const Dual<N> &a, double value, double slope) {
    Dual<N> r(value);
    for (int i = 0; i < N; ++i) r.d[i] = slope * a.d[i];
    return r;
}
}  // namespace detail

template <int N> Dual<N> sqrt(const Dual<N> &a) {
    double s = std::sqrt(a.v);
    return detail::chain(a, s, s > 0.0 ? 0.5 / s : 0.0);
}
template <int N> Dual<N> exp(const Dual<N> &a) {
    double e = std::exp(a.v);
    return detail::chain(a, e, e);
}
template <int N> Dual<N> log(const Dual<N> &a) { return detail::chain(a, std::log(a.v), 1.0 / a.v); }
template <int N> Dual<N> pow(const Dual<N> &a, double p) {
    double r = std::pow(a.v, p);
    return detail::chain(a, r, a.v > 0.0 ? p * std::pow(a.v, p - 1.0) : 0.0);
}
template <int N> Dual<N> abs(const Dual<N> &a) { return a.v < 0.0 ? -a : a; }
template <int N> Dual<N> sin(const Dual<N> &a) { return detail::chain(a, std::sin(a.v), std::cos(a.v)); }
template <int N> Dual<N> cos(const Dual<N> &a) { return detail::chain(a, std::cos(a.v), -std::sin(a.v)); }

inline double value_of(double x) { return x; }
template <int N> double value_of(const Dual<N> &x) { return x.v; }

template <typename T> T max_of(const T &a, double b) { return value_of(a) > b ? a : T(b); }
template <typename T> T min_of(const T &a, double b) { return value_of(a) < b ? a : T(b); }
template <typename T> T clamp_of(const T &a, double lo, double hi) { return min_of(max_of(a, lo), hi); }

template <typename T>
struct Vector3 {
    T x{}, y{}, z{};

    constexpr Vector3() = default;
    constexpr Vector3(T x_, T y_, T z_) : x(x_), y(y_), z(z_) {}
    template <typename U>
        requires(!std::is_same_v<U, T>)
    explicit Vector3(const Vector3<U> &o) : x(T(o.x)), y(T(o.y)), z(T(o.z)) {}

    T &operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    const T &operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    Vector3 &operator+=(const Vector3 &o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vector3 &operator-=(const Vector3 &o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vector3 &operator*=(const std::type_identity_t<T> &s) { x *= s; y *= s; z *= s; return *this; }
};

using Vec3 = Vector3<double>;

template <typename T> Vector3<T> operator+(Vector3<T> a, const Vector3<T> &b) { return a += b; }
template <typename T> Vector3<T> operator-(Vector3<T> a, const Vector3<T> &b) { return a -= b; }
template <typename T> Vector3<T> operator-(const Vector3<T> &a) { return {-a.x, -a.y, -a.z}; }
template <typename T> Vector3<T> operator*(Vector3<T> a, const std::type_identity_t<T> &s) { return a *= s; }
template <typename T> Vector3<T> operator*(const std::type_identity_t<T> &s, Vector3<T> a) { return a *= s; }
template <typename T> Vector3<T> operator/(const Vector3<T> &a, const std::type_identity_t<T> &s) {
    return {a.x / s, a.y / s, a.z / s};
}
// Componentwise product, used for RGB quantities.
template <typename T> Vector3<T> operator*(const Vector3<T> &a, const Vector3<T> &b) {
    return {a.x * b.x, a.y * b.y, a.z * b.z};
}

template <typename T> T dot(const Vector3<T> &a, const Vector3<T> &b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
template <typename T> Vector3<T> cross(const Vector3<T> &a, const Vector3<T> &b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
template <typename T> T length_squared(const Vector3<T> &a) { return dot(a, a); }
template <typename T> T length(const Vector3<T> &a) {
    using std::sqrt;
    return sqrt(dot(a, a));
}
template <typename T> Vector3<T> normalize(const Vector3<T> &a) { return a / length(a); }

inline double max_component(const Vec3 &a) { return std::max({a.x, a.y, a.z}); }
inline double min_component(const Vec3 &a) { return std::min({a.x, a.y, a.z}); }
inline bool is_finite(const Vec3 &a) { return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z); }

inline Vec3 value_of(const Vector3<double> &a) { return a; }
template <int N> Vec3 value_of(const Vector3<Dual<N>> &a) { return {a.x.v, a.y.v, a.z.v}; }

struct Vec2 {
    double x = 0.0, y = 0.0;
};

// Row-major 3x3 matrix.
template <typename T>
struct Matrix3 {
    std::array<std::array<T, 3>, 3> m{};

    static Matrix3 identity() {
        Matrix3 r;
        for (int i = 0; i < 3; ++i) r.m[i][i] = T(1.0);
        return r;
    }

    Vector3<T> operator*(const Vector3<T> &v) const {
        return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
                m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
                m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
    }
    Matrix3 operator*(const Matrix3 &o) const {
        Matrix3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                T s(0.0);
                for (int k = 0; k < 3; ++k) s += m[i][k] * o.m[k][j];
                r.m[i][j] = s;
            }
        return r;
    }
    Matrix3 transposed() const {
        Matrix3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i][j] = m[j][i];
        return r;
    }
};

using Mat3 = Matrix3<double>;

double determinant(const Mat3 &a);
// Throws std::domain_error when |det| is below `eps`.
Mat3 inverse(const Mat3 &a, double eps = 1e-12);

// Rodrigues' formula: rotation by |w| radians about w/|w|.
template <typename T>
Matrix3<T> rotation_from_axis_angle(const Vector3<T> &w) {
    using std::cos;
    using std::sin;
    using std::sqrt;
    T theta2 = dot(w, w);
    Matrix3<T> k;
    k.m = {{{T(0.0), -w.z, w.y}, {w.z, T(0.0), -w.x}, {-w.y, w.x, T(0.0)}}};
    Matrix3<T> r = Matrix3<T>::identity();
    T a, b;
    if (value_of(theta2) < 1e-16) {
        // Second-order Taylor expansion keeps derivatives exact at w = 0.
        a = T(1.0) - theta2 / 6.0;
        b = T(0.5) - theta2 / 24.0;
    } else {
        T theta = sqrt(theta2);
        a = sin(theta) / theta;
        b = (T(1.0) - cos(theta)) / theta2;
    }
    Matrix3<T> k2 = k * k;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = r.m[i][j] + a * k.m[i][j] + b * k2.m[i][j];
    return r;
}

// Builds an orthonormal basis around a unit vector (Duff et al. 2017).
inline void orthonormal_basis(const Vec3 &n, Vec3 &t, Vec3 &b) {
    double sign = std::copysign(1.0, n.z);
    double a = -1.0 / (sign + n.z);
    double bb = n.x * n.y * a;
    t = {1.0 + sign * n.x * n.x * a, sign * bb, -sign * n.x};
    b = {bb, sign + n.y * n.y * a, -n.y};
}

inline double luminance(const Vec3 &c) { return 0.2126 * c.x + 0.7152 * c.y + 0.0722 * c.z; }

}  // namespace procam

#endif  // PROCAM_MATH_H
