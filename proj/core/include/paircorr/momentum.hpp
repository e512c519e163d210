#pragma once

#include <cmath>

namespace paircorr {

/// Cartesian momentum (or any 3-vector) in atomic units.
struct Momentum3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Momentum3& operator+=(const Momentum3& o) noexcept {
        x += o.x; y += o.y; z += o.z;
        return *this;
    }
    constexpr Momentum3& operator-=(const Momentum3& o) noexcept {
        x -= o.x; y -= o.y; z -= o.z;
        return *this;
    }
    constexpr Momentum3& operator*=(double s) noexcept {
        x *= s; y *= s; z *= s;
        return *this;
    }

    friend constexpr Momentum3 operator+(Momentum3 a, const Momentum3& b) noexcept { return a += b; }
    friend constexpr Momentum3 operator-(Momentum3 a, const Momentum3& b) noexcept { return a -= b; }
    friend constexpr Momentum3 operator*(Momentum3 a, double s) noexcept { return a *= s; }
    friend constexpr Momentum3 operator*(double s, Momentum3 a) noexcept { return a *= s; }
    friend constexpr Momentum3 operator-(const Momentum3& a) noexcept { return {-a.x, -a.y, -a.z}; }
    friend constexpr bool operator==(const Momentum3&, const Momentum3&) = default;

    constexpr double dot(const Momentum3& o) const noexcept { return x * o.x + y * o.y + z * o.z; }
    constexpr double norm2() const noexcept { return dot(*this); }
    double norm() const noexcept { return std::sqrt(norm2()); }

    bool finite() const noexcept {
        return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
    }

    constexpr double operator[](int axis) const noexcept {
        return axis == 0 ? x : (axis == 1 ? y : z);
    }
};

} // namespace paircorr
