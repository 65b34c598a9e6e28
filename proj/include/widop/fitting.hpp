// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The widop Authors

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "widop/geometry.hpp"
#include "widop/pointcloud.hpp"
#include "widop/seed.hpp"

namespace widop {

/// Plane found by RANSAC together with the statistics the rules look at.
struct PlaneDetection {
    Plane3 plane;
    Vec3 centroid;
    /// 10th to 90th percentile range of the inliers along their second principal axis.
    double width = 0.0;
};

struct AngleCheck {
    bool holds = false;
    double angle_deg = 0.0;
};

namespace detail {

struct PrincipalAxes {
    Vec3 centroid;
    Vec3 axis[3]; // ascending variance
    double variance[3] = {0, 0, 0};
};

inline PrincipalAxes principal_axes(const PointCloud& pts, const std::vector<std::size_t>& idx) {
    PrincipalAxes out;
    for (auto i : idx) out.centroid = out.centroid + pts[i];
    out.centroid = out.centroid / static_cast<double>(idx.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (auto i : idx) {
        Vec3 d = pts[i] - out.centroid;
        Eigen::Vector3d v(d.x, d.y, d.z);
        cov += v * v.transpose();
    }
    cov /= static_cast<double>(idx.size());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
    for (int k = 0; k < 3; ++k) {
        Eigen::Vector3d e = solver.eigenvectors().col(k);
        out.axis[k] = normalized(Vec3{e.x(), e.y(), e.z()});
        out.variance[k] = std::max(0.0, solver.eigenvalues()[k]);
    }
    return out;
}

inline double interdecile_range(const PointCloud& pts, const std::vector<std::size_t>& idx, const Vec3& origin,
                                const Vec3& axis) {
    std::vector<double> t;
    t.reserve(idx.size());
    for (auto i : idx) t.push_back(dot(pts[i] - origin, axis));
    std::sort(t.begin(), t.end());
    return t[t.size() * 9 / 10] - t[t.size() / 10];
}

inline double line_distance(const Vec3& p, const Vec3& anchor, const Vec3& dir) { return norm(cross(p - anchor, dir)); }

inline double plane_distance(const Vec3& p, const Vec3& anchor, const Vec3& normal) {
    return std::abs(dot(p - anchor, normal));
}

template <typename Dist>
std::vector<std::size_t> inliers_of(const PointCloud& pts, const std::vector<std::size_t>& pool, double tol, Dist&& dist) {
    std::vector<std::size_t> out;
    for (auto i : pool) {
        if (dist(pts[i]) <= tol) out.push_back(i);
    }
    return out;
}

inline std::vector<std::size_t> remove_sorted(const std::vector<std::size_t>& from, const std::vector<std::size_t>& gone) {
    std::vector<std::size_t> out;
    std::set_difference(from.begin(), from.end(), gone.begin(), gone.end(), std::back_inserter(out));
    return out;
}

/// Sequential RANSAC over `pts`: `sample` draws a hypothesis (or nothing for degenerate
/// draws), `distance` scores a point against a model, `refit` fits a model to inliers.
/// Emits (model, inliers) for each accepted primitive; inliers are removed between rounds.
template <typename Model, typename Sample, typename Distance, typename Refit, typename Emit>
void sequential_ransac(const PointCloud& pts, const DetectorConfig& cfg, std::size_t sample_size, Sample&& sample,
                       Distance&& distance, Refit&& refit, Emit&& emit) {
    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> remaining(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) remaining[i] = i;

    while (remaining.size() >= std::max(cfg.min_inliers, sample_size)) {
        std::optional<Model> best;
        std::size_t best_count = 0;
        std::vector<std::size_t> pick(sample_size);
        for (std::size_t it = 0; it < cfg.ransac_iterations; ++it) {
            for (std::size_t k = 0; k < sample_size; ++k) pick[k] = remaining[rng() % remaining.size()];
            std::optional<Model> m = sample(pick);
            if (!m) continue;
            std::size_t count = 0;
            for (auto i : remaining) {
                if (distance(*m, pts[i]) <= cfg.inlier_distance) ++count;
            }
            if (count > best_count) {
                best_count = count;
                best = m;
            }
        }
        if (!best || best_count < cfg.min_inliers) break;

        auto in_of = [&](const Model& m) {
            return inliers_of(pts, remaining, cfg.inlier_distance, [&](const Vec3& p) { return distance(m, p); });
        };
        auto inliers = in_of(*best);
        Model model = refit(inliers);
        auto refined = in_of(model);
        if (refined.size() >= cfg.min_inliers) {
            inliers = std::move(refined);
            model = refit(inliers);
        }
        remaining = remove_sorted(remaining, inliers);
        emit(model, inliers);
    }
}

} // namespace detail

/// Lines found by sequential RANSAC, sorted by descending inlier count.
inline std::vector<Line3> ransac_lines_3d(const PointCloud& sub, const DetectorConfig& cfg) {
    struct Model {
        Vec3 anchor, dir;
    };
    std::vector<Line3> lines;
    detail::sequential_ransac<Model>(
        sub, cfg, 2,
        [&](const std::vector<std::size_t>& pick) -> std::optional<Model> {
            Vec3 d = sub[pick[1]] - sub[pick[0]];
            if (norm(d) < 1e-12) return std::nullopt;
            return Model{sub[pick[0]], normalized(d)};
        },
        [](const Model& m, const Vec3& p) { return detail::line_distance(p, m.anchor, m.dir); },
        [&](const std::vector<std::size_t>& idx) {
            auto pa = detail::principal_axes(sub, idx);
            return Model{pa.centroid, canonical_sign(pa.axis[2])};
        },
        [&](const Model& m, const std::vector<std::size_t>& idx) {
            Line3 l{m.anchor, m.dir, idx.size(), 0.0, 0.0};
            bool first = true;
            for (auto i : idx) {
                double t = dot(sub[i] - m.anchor, m.dir);
                l.extent_min = first ? t : std::min(l.extent_min, t);
                l.extent_max = first ? t : std::max(l.extent_max, t);
                first = false;
            }
            lines.push_back(l);
        });
    std::stable_sort(lines.begin(), lines.end(), [](const Line3& a, const Line3& b) { return a.inliers > b.inliers; });
    return lines;
}

/// Planes found by sequential RANSAC (3-point hypotheses), sorted by descending inlier count.
/// Planes narrower than the configured minimum width are consumed but not reported.
inline std::vector<PlaneDetection> ransac_planes_3d(const PointCloud& sub, const DetectorConfig& cfg) {
    struct Model {
        Vec3 anchor, normal;
    };
    std::vector<PlaneDetection> planes;
    detail::sequential_ransac<Model>(
        sub, cfg, 3,
        [&](const std::vector<std::size_t>& pick) -> std::optional<Model> {
            Vec3 n = cross(sub[pick[1]] - sub[pick[0]], sub[pick[2]] - sub[pick[0]]);
            if (norm(n) < 1e-12) return std::nullopt;
            return Model{sub[pick[0]], normalized(n)};
        },
        [](const Model& m, const Vec3& p) { return detail::plane_distance(p, m.anchor, m.normal); },
        [&](const std::vector<std::size_t>& idx) {
            auto pa = detail::principal_axes(sub, idx);
            return Model{pa.centroid, canonical_sign(pa.axis[0])};
        },
        [&](const Model& m, const std::vector<std::size_t>& idx) {
            auto pa = detail::principal_axes(sub, idx);
            double width = detail::interdecile_range(sub, idx, pa.centroid, pa.axis[1]);
            if (width < cfg.min_plane_width) return;
            planes.push_back({Plane3{m.normal, dot(m.normal, m.anchor), idx.size()}, pa.centroid, width});
        });
    std::stable_sort(planes.begin(), planes.end(),
                     [](const PlaneDetection& a, const PlaneDetection& b) { return a.plane.inliers > b.plane.inliers; });
    return planes;
}

inline bool is_vertical(const Line3& line, double tol_deg) {
    return line_angle_deg(line.direction, {0, 0, 1}) <= tol_deg;
}

/// The plane itself stands upright: its normal lies within `tol_deg` of the horizontal.
inline bool is_vertical_plane(const Plane3& p, double tol_deg) {
    return 90.0 - line_angle_deg(p.normal, {0, 0, 1}) <= tol_deg;
}

inline bool is_horizontal_plane(const Plane3& p, double tol_deg) {
    return line_angle_deg(p.normal, {0, 0, 1}) <= tol_deg;
}

inline std::optional<Plane3> detect_front_face(const PointCloud& sub, const DetectorConfig& cfg) {
    for (const auto& d : ransac_planes_3d(sub, cfg)) {
        if (is_vertical_plane(d.plane, cfg.vertical_tolerance_deg)) return d.plane;
    }
    return std::nullopt;
}

inline AngleCheck check_parallel(const Line3& a, const Line3& b, double tol_deg) {
    double angle = line_angle_deg(a.direction, b.direction);
    return {angle <= tol_deg, angle};
}

inline AngleCheck check_perpendicular(const Line3& a, const Line3& b, double tol_deg) {
    double angle = line_angle_deg(a.direction, b.direction);
    return {90.0 - angle <= tol_deg, angle};
}

} // namespace widop
