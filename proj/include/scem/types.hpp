#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace scem {

inline constexpr double kGravity = 9.81;           // m/s^2
inline constexpr double kEarthRotation = 7.2921e-5; // rad/s
inline constexpr double kEarthRadius = 6371000.0;  // m
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDegToRad = kPi / 180.0;
inline constexpr double kRadToDeg = 180.0 / kPi;

inline constexpr double kBarrelM3 = 0.158987;  // m^3 per barrel
inline constexpr double kKnotMs = 0.514444;    // m/s per knot

/// Thrown when a configuration value, file or option is invalid.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when an iterative solve cannot reach its tolerance.
struct ConvergenceError : std::runtime_error {
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what), residual(residual) {}
    double residual;
};

/// Thrown on an invalid numerical argument to a model operation.
struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
    friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
    friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
    friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
    friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
    friend constexpr bool operator==(const Vec2&, const Vec2&) = default;

    double norm() const { return std::hypot(x, y); }
    /// Bearing of the vector, radians clockwise from north.
    double bearing() const { return std::atan2(x, y); }
    static Vec2 from_bearing(double bearing_rad, double magnitude) {
        return {magnitude * std::sin(bearing_rad), magnitude * std::cos(bearing_rad)};
    }
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend constexpr Vec3 operator+(const Vec3& a, const Vec3& b) {
        return {a.x + b.x, a.y + b.y, a.z + b.z};
    }
    friend constexpr Vec3 operator*(const Vec3& a, double s) { return {a.x * s, a.y * s, a.z * s}; }
    Vec2 xy() const { return {x, y}; }
};

struct CellIndex {
    int i = 0;
    int j = 0;
    friend constexpr bool operator==(const CellIndex&, const CellIndex&) = default;
    friend constexpr auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

/// Dense row-major 2D array indexed (i, j) with i the fast (west-east) axis.
template <typename T>
class Grid2 {
public:
    Grid2() = default;
    Grid2(int nx, int ny, T value = T{})
        : nx_(nx), ny_(ny), data_(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny), value) {
        if (nx < 0 || ny < 0) throw std::invalid_argument("Grid2: negative extent");
    }

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    std::size_t size() const { return data_.size(); }
    bool contains(int i, int j) const { return i >= 0 && j >= 0 && i < nx_ && j < ny_; }

    T& operator()(int i, int j) { return data_[index(i, j)]; }
    const T& operator()(int i, int j) const { return data_[index(i, j)]; }
    T& operator()(CellIndex c) { return (*this)(c.i, c.j); }
    const T& operator()(CellIndex c) const { return (*this)(c.i, c.j); }

    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }
    void fill(const T& value) { std::fill(data_.begin(), data_.end(), value); }

    friend bool operator==(const Grid2&, const Grid2&) = default;

private:
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(i);
    }

    int nx_ = 0;
    int ny_ = 0;
    std::vector<T> data_;
};

}  // namespace scem
