// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The widop Authors

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "widop/error.hpp"
#include "widop/geometry.hpp"
#include "widop/text.hpp"

namespace widop {

using PointCloud = std::vector<Vec3>;

/// Horizontal seed location of a detected element.
struct Point2 {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point2&, const Point2&) = default;
    friend auto operator<=>(const Point2&, const Point2&) = default;
};

struct DetectorConfig {
    double grid_cell = 0.5;
    double vertical_threshold = 1.0;
    double segmentation_radius = 1.5;
    std::size_t ransac_iterations = 500;
    double inlier_distance = 0.05;
    std::size_t min_inliers = 20;
    double vertical_tolerance_deg = 10.0;
    std::uint64_t seed = 0;

    /// Points at least the threshold above the cell floor needed to accept a vertical cell.
    std::size_t min_elevated_points = 5;
    /// Height above local ground from which a point counts as raised (horizontal detection).
    double slab_min_height = 0.1;
    double min_horizontal_extent = 0.5;
    /// Points with fewer than `outlier_min_neighbors` others within `outlier_radius` are dropped.
    double outlier_radius = 0.5;
    std::size_t outlier_min_neighbors = 2;
    /// Planes narrower than this are not reported. Width is the 10th to 90th percentile range
    /// of the inliers along their second principal axis.
    double min_plane_width = 0.12;
    /// Horizontal planes must sit this far above the segment floor to count.
    double min_plane_elevation = 0.2;
    /// Lines and planes are fitted to segment points at least this far above the segment floor.
    double feature_clearance = 0.1;

    void validate() const {
        auto positive = [](double v, const char* name) {
            if (!(v > 0.0) || !std::isfinite(v)) throw Error(std::string(name) + " must be positive");
        };
        positive(grid_cell, "grid-cell");
        positive(vertical_threshold, "vertical-threshold");
        positive(segmentation_radius, "segmentation-radius");
        positive(static_cast<double>(ransac_iterations), "ransac-iters");
        positive(inlier_distance, "inlier-dist");
        positive(static_cast<double>(min_inliers), "min-inliers");
        positive(slab_min_height, "slab-min-height");
        positive(min_horizontal_extent, "min-horizontal-extent");
        positive(outlier_radius, "outlier-radius");
        positive(min_plane_width, "min-plane-width");
        positive(min_plane_elevation, "min-plane-elevation");
        if (!(feature_clearance >= 0.0) || !std::isfinite(feature_clearance)) {
            throw Error("feature-clearance must be non-negative");
        }
        if (!(vertical_tolerance_deg > 0.0 && vertical_tolerance_deg < 90.0)) {
            throw Error("vertical-tolerance must lie in (0, 90) degrees");
        }
    }
};

// ---- I/O --------------------------------------------------------------------------

inline PointCloud parse_cloud(std::string_view content) {
    PointCloud out;
    std::size_t lineno = 0;
    for (auto raw : text::lines(content)) {
        ++lineno;
        auto line = text::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        auto f = text::split_ws(line);
        if (f.size() != 3) throw ParseError("expected 'x y z', got " + std::to_string(f.size()) + " fields", lineno);
        Vec3 p;
        for (std::size_t i = 0; i < 3; ++i) {
            auto v = text::parse_double(f[i]);
            if (!v) throw ParseError("bad coordinate '" + std::string(f[i]) + "'", lineno);
            p[i] = *v;
        }
        out.push_back(p);
    }
    return out;
}

inline PointCloud load_cloud(const std::string& path) { return parse_cloud(text::read_file(path)); }

inline std::string format_cloud(const PointCloud& cloud) {
    std::string out;
    out.reserve(cloud.size() * 24);
    for (const auto& p : cloud) {
        out += text::format_double(p.x) + ' ' + text::format_double(p.y) + ' ' + text::format_double(p.z) + '\n';
    }
    return out;
}

inline void save_cloud(const PointCloud& cloud, const std::string& path) { text::write_file(path, format_cloud(cloud)); }

// ---- grids -------------------------------------------------------------------------

namespace detail {

using CellKey = std::pair<std::int64_t, std::int64_t>;

inline CellKey cell_of(double x, double y, double size) {
    return {static_cast<std::int64_t>(std::floor(x / size)), static_cast<std::int64_t>(std::floor(y / size))};
}

/// Point indices bucketed by xy cell.
inline std::map<CellKey, std::vector<std::size_t>> bucket(const PointCloud& cloud, double size) {
    std::map<CellKey, std::vector<std::size_t>> cells;
    for (std::size_t i = 0; i < cloud.size(); ++i) cells[cell_of(cloud[i].x, cloud[i].y, size)].push_back(i);
    return cells;
}

/// 8-connected components of `cells`, each sorted, in order of their smallest key.
inline std::vector<std::vector<CellKey>> components(const std::vector<CellKey>& cells) {
    std::map<CellKey, bool> open;
    for (const auto& c : cells) open[c] = true;
    std::vector<std::vector<CellKey>> out;
    for (auto& [start, unvisited] : open) {
        if (!unvisited) continue;
        std::vector<CellKey> comp;
        std::deque<CellKey> todo{start};
        unvisited = false;
        while (!todo.empty()) {
            auto cur = todo.front();
            todo.pop_front();
            comp.push_back(cur);
            for (std::int64_t dx = -1; dx <= 1; ++dx) {
                for (std::int64_t dy = -1; dy <= 1; ++dy) {
                    auto it = open.find({cur.first + dx, cur.second + dy});
                    if (it != open.end() && it->second) {
                        it->second = false;
                        todo.push_back(it->first);
                    }
                }
            }
        }
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
    }
    return out;
}

} // namespace detail

/// Drops points with fewer than `min_neighbors` other points within `radius` (3D). Order preserved.
inline PointCloud remove_isolated_points(const PointCloud& cloud, double radius, std::size_t min_neighbors) {
    if (min_neighbors == 0) return cloud;
    struct Key {
        std::int64_t x, y, z;
        auto operator<=>(const Key&) const = default;
    };
    auto key = [radius](const Vec3& p) {
        return Key{static_cast<std::int64_t>(std::floor(p.x / radius)), static_cast<std::int64_t>(std::floor(p.y / radius)),
                   static_cast<std::int64_t>(std::floor(p.z / radius))};
    };
    std::map<Key, std::vector<std::size_t>> grid;
    for (std::size_t i = 0; i < cloud.size(); ++i) grid[key(cloud[i])].push_back(i);
    const double r2 = radius * radius;
    PointCloud out;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        Key k = key(cloud[i]);
        std::size_t found = 0;
        for (std::int64_t dx = -1; dx <= 1 && found < min_neighbors; ++dx) {
            for (std::int64_t dy = -1; dy <= 1 && found < min_neighbors; ++dy) {
                for (std::int64_t dz = -1; dz <= 1 && found < min_neighbors; ++dz) {
                    auto it = grid.find(Key{k.x + dx, k.y + dy, k.z + dz});
                    if (it == grid.end()) continue;
                    for (std::size_t j : it->second) {
                        if (j == i) continue;
                        Vec3 d = cloud[j] - cloud[i];
                        if (dot(d, d) <= r2 && ++found >= min_neighbors) break;
                    }
                }
            }
        }
        if (found >= min_neighbors) out.push_back(cloud[i]);
    }
    return out;
}

// ---- detection ---------------------------------------------------------------------

namespace detail {

/// Cells holding at least `min_elevated_points` points a full threshold above the cell floor.
inline std::vector<CellKey> vertical_cells(const PointCloud& cloud, const std::map<CellKey, std::vector<std::size_t>>& cells,
                                           const DetectorConfig& cfg) {
    std::vector<CellKey> out;
    for (const auto& [key, idx] : cells) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (auto i : idx) {
            lo = std::min(lo, cloud[i].z);
            hi = std::max(hi, cloud[i].z);
        }
        if (hi - lo < cfg.vertical_threshold) continue;
        std::size_t raised = 0;
        for (auto i : idx) {
            if (cloud[i].z - lo >= cfg.vertical_threshold) ++raised;
        }
        if (raised >= cfg.min_elevated_points) out.push_back(key);
    }
    return out;
}

} // namespace detail

/// Seeds of elements with vertical extent: cells whose z range reaches the threshold,
/// merged by 8-connectivity, one point-weighted xy centroid per cluster, sorted by (x, y).
inline std::vector<Point2> detect_vertical_elements(const PointCloud& cloud, const DetectorConfig& cfg) {
    auto cells = detail::bucket(cloud, cfg.grid_cell);
    const auto candidates = detail::vertical_cells(cloud, cells, cfg);
    std::vector<Point2> seeds;
    for (const auto& comp : detail::components(candidates)) {
        double sx = 0, sy = 0;
        std::size_t n = 0;
        for (const auto& key : comp) {
            for (auto i : cells.at(key)) {
                sx += cloud[i].x;
                sy += cloud[i].y;
                ++n;
            }
        }
        seeds.push_back({sx / static_cast<double>(n), sy / static_cast<double>(n)});
    }
    std::sort(seeds.begin(), seeds.end());
    return seeds;
}

/// Seeds of raised elements that spread sideways but stay below the vertical threshold.
/// Local ground is the lowest point in the surrounding 3x3 cells. Clusters touching a cell
/// the vertical detector accepts, and seeds within the segmentation radius of a vertical
/// seed, are dropped.
inline std::vector<Point2> detect_horizontal_elements(const PointCloud& cloud, const DetectorConfig& cfg) {
    auto cells = detail::bucket(cloud, cfg.grid_cell);
    std::map<detail::CellKey, double> floor;
    for (const auto& [key, idx] : cells) {
        double lo = std::numeric_limits<double>::infinity();
        for (auto i : idx) lo = std::min(lo, cloud[i].z);
        floor[key] = lo;
    }
    std::map<detail::CellKey, std::vector<std::size_t>> raised;
    for (const auto& [key, idx] : cells) {
        double g = floor[key];
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
            for (std::int64_t dy = -1; dy <= 1; ++dy) {
                auto it = floor.find({key.first + dx, key.second + dy});
                if (it != floor.end()) g = std::min(g, it->second);
            }
        }
        for (auto i : idx) {
            if (cloud[i].z - g >= cfg.slab_min_height) raised[key].push_back(i);
        }
    }
    std::vector<detail::CellKey> keys;
    for (const auto& [key, idx] : raised) keys.push_back(key);

    const auto vertical = detect_vertical_elements(cloud, cfg);
    const auto tall_cells = detail::vertical_cells(cloud, cells, cfg);
    const std::set<detail::CellKey> tall(tall_cells.begin(), tall_cells.end());
    std::vector<Point2> seeds;
    for (const auto& comp : detail::components(keys)) {
        Box3 ext({0, 0, 0}, {0, 0, 0});
        bool first = true;
        double sx = 0, sy = 0;
        std::size_t n = 0;
        for (const auto& key : comp) {
            for (auto i : raised.at(key)) {
                const auto& p = cloud[i];
                if (first) {
                    ext = Box3(p, p);
                    first = false;
                }
                ext.min = {std::min(ext.min.x, p.x), std::min(ext.min.y, p.y), std::min(ext.min.z, p.z)};
                ext.max = {std::max(ext.max.x, p.x), std::max(ext.max.y, p.y), std::max(ext.max.z, p.z)};
                sx += p.x;
                sy += p.y;
                ++n;
            }
        }
        if (n < cfg.min_elevated_points) continue;
        if (std::any_of(comp.begin(), comp.end(), [&](const detail::CellKey& k) { return tall.count(k) > 0; })) continue;
        if (std::max(ext.max.x - ext.min.x, ext.max.y - ext.min.y) < cfg.min_horizontal_extent) continue;
        Point2 seed{sx / static_cast<double>(n), sy / static_cast<double>(n)};
        bool near_vertical = std::any_of(vertical.begin(), vertical.end(), [&](const Point2& v) {
            return std::hypot(v.x - seed.x, v.y - seed.y) <= cfg.segmentation_radius;
        });
        if (!near_vertical) seeds.push_back(seed);
    }
    std::sort(seeds.begin(), seeds.end());
    return seeds;
}

/// Points within the segmentation radius of `seed` in the xy plane, input order preserved.
inline PointCloud segment_2d(const PointCloud& cloud, Point2 seed, const DetectorConfig& cfg) {
    PointCloud out;
    const double r2 = cfg.segmentation_radius * cfg.segmentation_radius;
    for (const auto& p : cloud) {
        double dx = p.x - seed.x, dy = p.y - seed.y;
        if (dx * dx + dy * dy <= r2) out.push_back(p);
    }
    return out;
}

inline Box3 bounding_box(const PointCloud& sub) {
    if (sub.empty()) throw GeometryError("bounding box of an empty point set");
    Vec3 lo = sub.front(), hi = sub.front();
    for (const auto& p : sub) {
        for (std::size_t k = 0; k < 3; ++k) {
            lo[k] = std::min(lo[k], p[k]);
            hi[k] = std::max(hi[k], p[k]);
        }
    }
    return Box3(lo, hi);
}

inline double approximate_height(const PointCloud& sub) {
    if (sub.empty()) throw GeometryError("height of an empty point set");
    return bounding_box(sub).height();
}

} // namespace widop
