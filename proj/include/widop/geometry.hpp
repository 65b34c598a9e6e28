// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The widop Authors

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstddef>
#include <numbers>

#include "widop/error.hpp"

namespace widop {

/// Point or vector in meters, z up.
struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr double operator[](std::size_t i) const { return i == 0 ? x : (i == 1 ? y : z); }
    constexpr double& operator[](std::size_t i) { return i == 0 ? x : (i == 1 ? y : z); }

    friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend constexpr Vec3 operator*(Vec3 a, double s) { return {a.x * s, a.y * s, a.z * s}; }
    friend constexpr Vec3 operator*(double s, Vec3 a) { return a * s; }
    friend constexpr Vec3 operator/(Vec3 a, double s) { return {a.x / s, a.y / s, a.z / s}; }
    friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
    friend constexpr auto operator<=>(const Vec3&, const Vec3&) = default;
};

constexpr double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }

inline Vec3 normalized(Vec3 a) {
    double n = norm(a);
    if (n == 0.0) throw GeometryError("cannot normalize a zero vector");
    return a / n;
}

inline double distance(Vec3 a, Vec3 b) { return norm(a - b); }

/// Flips `v` so that its largest-magnitude component is positive (first one on ties).
inline Vec3 canonical_sign(Vec3 v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < 3; ++i) {
        if (std::abs(v[i]) > std::abs(v[best])) best = i;
    }
    return v[best] < 0.0 ? v * -1.0 : v;
}

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Angle between two directions as undirected lines, in degrees within [0, 90].
/// Same value as acos(|d1.d2|) for unit inputs, without its loss of precision near 0.
inline double line_angle_deg(Vec3 d1, Vec3 d2) {
    return rad_to_deg(std::atan2(norm(cross(d1, d2)), std::abs(dot(d1, d2))));
}

/// Axis-aligned bounding box. Canonical form is the pair of min/max corners.
struct Box3 {
    Vec3 min;
    Vec3 max;

    Box3() = default;
    Box3(Vec3 lo, Vec3 hi) : min(lo), max(hi) {
        if (lo.x > hi.x || lo.y > hi.y || lo.z > hi.z) {
            throw GeometryError("box min corner exceeds max corner");
        }
    }

    Vec3 centroid() const { return (min + max) * 0.5; }
    Vec3 extents() const { return max - min; }
    double height() const { return max.z - min.z; }

    bool contains(Vec3 p) const {
        return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y && p.z >= min.z &&
               p.z <= max.z;
    }

    /// Corner i picks max on axis k iff bit k of i is set (x = bit 0, y = bit 1, z = bit 2).
    std::array<Vec3, 8> corners() const {
        std::array<Vec3, 8> out{};
        for (std::size_t i = 0; i < 8; ++i) {
            out[i] = {(i & 1U) ? max.x : min.x, (i & 2U) ? max.y : min.y, (i & 4U) ? max.z : min.z};
        }
        return out;
    }

    friend bool operator==(const Box3&, const Box3&) = default;
};

/// Fitted 3D line: anchor point, unit direction with canonical sign, support and extent
/// (parameter range of the inliers along the direction, measured from the anchor).
struct Line3 {
    Vec3 anchor;
    Vec3 direction{0.0, 0.0, 1.0};
    std::size_t inliers = 0;
    double extent_min = 0.0;
    double extent_max = 0.0;

    friend bool operator==(const Line3&, const Line3&) = default;
};

/// Fitted plane: n·p = offset for points p on the plane.
struct Plane3 {
    Vec3 normal{0.0, 0.0, 1.0};
    double offset = 0.0;
    std::size_t inliers = 0;

    friend bool operator==(const Plane3&, const Plane3&) = default;
};

} // namespace widop
