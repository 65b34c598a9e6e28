// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The widop Authors

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "widop/error.hpp"
#include "widop/pipeline.hpp"
#include "widop/text.hpp"

// Every tunable of a pipeline run under one name, shared by config files (`name = value`)
// and command-line flags (`--name value`).

namespace widop {

struct Setting {
    std::string name;
    std::string help;
    bool is_path = false;
    std::function<void(PipelineConfig&, std::string_view)> apply;
};

namespace detail {

inline double setting_number(std::string_view name, std::string_view v) {
    auto d = text::parse_double(v);
    if (!d) throw Error("'" + std::string(name) + "' expects a number, got '" + std::string(v) + "'");
    return *d;
}

inline std::uint64_t setting_count(std::string_view name, std::string_view v) {
    double d = setting_number(name, v);
    if (d < 0 || d != std::floor(d) || d > 9.0e15) {
        throw Error("'" + std::string(name) + "' expects a non-negative integer, got '" + std::string(v) + "'");
    }
    return static_cast<std::uint64_t>(d);
}

inline bool setting_flag(std::string_view name, std::string_view v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw Error("'" + std::string(name) + "' expects true or false, got '" + std::string(v) + "'");
}

} // namespace detail

inline const std::vector<Setting>& settings() {
    using C = PipelineConfig;
    auto path = [](std::string name, std::string help, std::string C::*field) {
        return Setting{name, std::move(help), true, [field](C& c, std::string_view v) { c.*field = std::string(v); }};
    };
    auto num = [](std::string name, std::string help, std::function<double&(C&)> field) {
        return Setting{name, std::move(help), false, [name, field](C& c, std::string_view v) {
                           field(c) = detail::setting_number(name, v);
                       }};
    };
    auto count = [](std::string name, std::string help, std::function<std::size_t&(C&)> field) {
        return Setting{name, std::move(help), false, [name, field](C& c, std::string_view v) {
                           field(c) = static_cast<std::size_t>(detail::setting_count(name, v));
                       }};
    };
    auto flag = [](std::string name, std::string help, std::function<bool&(C&)> field) {
        return Setting{name, std::move(help), false, [name, field](C& c, std::string_view v) {
                           field(c) = detail::setting_flag(name, v);
                       }};
    };
    static const std::vector<Setting> all = {
        path("cloud", "point cloud (.xyz)", &C::cloud_path),
        path("kb", "knowledge base (default: built-in domain pack)", &C::kb_path),
        path("rules", "rule file (default: built-in rules)", &C::rules_path),
        path("truth", "ground truth file", &C::truth_path),
        path("colormap", "VRML colors, Class=r g b", &C::colormap_path),
        path("out-kb", "output knowledge base", &C::out_kb),
        path("out-vrml", "output VRML scene", &C::out_vrml),
        path("report", "output report", &C::report_path),
        Setting{"seed", "seed for every stochastic stage", false,
                [](C& c, std::string_view v) { c.set_seed(detail::setting_count("seed", v)); }},
        num("grid-cell", "detector grid cell size (m)", [](C& c) -> double& { return c.detector.grid_cell; }),
        num("vertical-threshold", "vertical extent threshold (m)",
            [](C& c) -> double& { return c.detector.vertical_threshold; }),
        num("segmentation-radius", "segmentation radius (m)",
            [](C& c) -> double& { return c.detector.segmentation_radius; }),
        count("ransac-iters", "RANSAC iterations", [](C& c) -> std::size_t& { return c.detector.ransac_iterations; }),
        num("inlier-dist", "RANSAC inlier distance (m)", [](C& c) -> double& { return c.detector.inlier_distance; }),
        count("min-inliers", "RANSAC minimum inliers", [](C& c) -> std::size_t& { return c.detector.min_inliers; }),
        num("vertical-tolerance", "verticality tolerance (degrees)",
            [](C& c) -> double& { return c.detector.vertical_tolerance_deg; }),
        count("min-elevated-points", "points a full threshold above a cell floor for a vertical cell",
              [](C& c) -> std::size_t& { return c.detector.min_elevated_points; }),
        num("slab-min-height", "height above local ground of raised points (m)",
            [](C& c) -> double& { return c.detector.slab_min_height; }),
        num("min-horizontal-extent", "smallest horizontal element (m)",
            [](C& c) -> double& { return c.detector.min_horizontal_extent; }),
        num("outlier-radius", "isolated point search radius (m)", [](C& c) -> double& { return c.detector.outlier_radius; }),
        count("outlier-min-neighbors", "neighbors a point needs to be kept",
              [](C& c) -> std::size_t& { return c.detector.outlier_min_neighbors; }),
        num("min-plane-width", "narrowest reported plane (m)", [](C& c) -> double& { return c.detector.min_plane_width; }),
        num("min-plane-elevation", "height of a horizontal plane above the segment floor (m)",
            [](C& c) -> double& { return c.detector.min_plane_elevation; }),
        num("feature-clearance", "fit lines and planes above this height over the segment floor (m)",
            [](C& c) -> double& { return c.detector.feature_clearance; }),
        num("touch-epsilon", "gap up to which boxes touch (m)", [](C& c) -> double& { return c.topo.touch_epsilon; }),
        num("distance-tolerance", "relative tolerance of spacing tests",
            [](C& c) -> double& { return c.topo.distance_tolerance; }),
        num("overlap-epsilon", "overlap needed for intersection (m)", [](C& c) -> double& { return c.topo.overlap_epsilon; }),
        flag("horizontal-distance", "measure spacing in the xy plane only",
             [](C& c) -> bool& { return c.topo.horizontal_distance; }),
        count("max-iterations", "rule engine round limit", [](C& c) -> std::size_t& { return c.engine.max_iterations; }),
        flag("trace", "record rule firings", [](C& c) -> bool& { return c.engine.trace; }),
        num("match-dist", "evaluation match distance (m)", [](C& c) -> double& { return c.eval.match_distance; }),
        count("ancestor-levels", "ancestor classes accepted by the evaluation",
              [](C& c) -> std::size_t& { return c.eval.ancestor_levels; }),
    };
    return all;
}

inline const Setting* find_setting(std::string_view name) {
    for (const auto& s : settings()) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

/// Applies one setting; unknown names and malformed values throw Error.
inline void apply_setting(PipelineConfig& cfg, std::string_view name, std::string_view value) {
    const Setting* s = find_setting(name);
    if (!s) throw Error("unknown setting '" + std::string(name) + "'");
    s->apply(cfg, value);
}

/// `name = value` lines with '#' comments, in file order.
inline std::vector<std::pair<std::string, std::string>> parse_settings(std::string_view content) {
    std::vector<std::pair<std::string, std::string>> out;
    std::size_t lineno = 0;
    for (auto raw : text::lines(content)) {
        ++lineno;
        auto line = text::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError("expected name = value", lineno);
        std::string name(text::trim(line.substr(0, eq)));
        std::string value(text::trim(line.substr(eq + 1)));
        if (!find_setting(name)) throw ParseError("unknown setting '" + name + "'", lineno);
        out.emplace_back(std::move(name), std::move(value));
    }
    return out;
}

/// Applies a config file's settings; errors carry the line number.
inline void apply_settings_text(PipelineConfig& cfg, std::string_view content) {
    std::size_t lineno = 0;
    for (auto raw : text::lines(content)) {
        ++lineno;
        auto line = text::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError("expected name = value", lineno);
        try {
            apply_setting(cfg, text::trim(line.substr(0, eq)), text::trim(line.substr(eq + 1)));
        } catch (const Error& e) {
            throw ParseError(e.what(), lineno);
        }
    }
}

} // namespace widop
