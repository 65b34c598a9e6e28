// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The widop Authors

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "widop/error.hpp"
#include "widop/geometry.hpp"
#include "widop/kb.hpp"
#include "widop/pointcloud.hpp"
#include "widop/seed.hpp"
#include "widop/text.hpp"

// Synthetic railway scenes: a ground strip along x (track axis), objects on both sides,
// Gaussian noise along surface normals and uniform clutter.

namespace widop {

struct Placement {
    std::string class_name;
    double x = 0.0;
    double y = 0.0;
    double height = 0.0;
};

struct SceneSpec {
    double track_length = 500.0;
    double ground_width = 12.0; // centered on y = 0
    double ground_density = 4.0; // points per square meter
    double noise_sigma = 0.02;
    double clutter_fraction = 0.05;
    double clutter_height = 8.0;
    std::uint64_t seed = 0;

    // Procedural placements; explicit `objects` are added after them.
    std::size_t masts = 10;
    double mast_spacing = 50.0;
    double mast_offset = 25.0;
    double mast_y = 3.0;
    std::size_t signals = 5;
    double signal_spacing = 100.0;
    double signal_offset = 50.0;
    double signal_y = -3.0;
    std::size_t schaltanlagen = 3;
    double schaltanlage_spacing = 100.0;
    double schaltanlage_offset = 100.0;
    double schaltanlage_y = -4.5;
    /// Raised ground steps (a flat top with an upright edge), placed at y = 4.5.
    std::size_t raised_patches = 0;

    double pole_density = 40.0;   // points per meter of pole
    double panel_density = 400.0; // points per square meter of panel
    std::size_t head_points = 24;
    std::size_t min_object_points = 20;

    std::vector<Placement> objects;

    void validate() const {
        if (!(track_length > 0) || !(ground_width > 0) || !(ground_density > 0)) {
            throw Error("scene lengths and densities must be positive");
        }
        if (!(noise_sigma >= 0)) throw Error("noise sigma must be non-negative");
        if (!(clutter_fraction >= 0 && clutter_fraction < 1)) throw Error("clutter fraction must lie in [0, 1)");
        if (!(pole_density > 0) || !(panel_density > 0)) throw Error("object densities must be positive");
    }
};

struct TruthObject {
    std::string id;
    std::string class_name;
    Box3 box;
    Vec3 anchor;
};

using GroundTruth = std::vector<TruthObject>;

struct Scene {
    PointCloud cloud;
    GroundTruth truth;
};

// ---- spec file --------------------------------------------------------------------

/// Parses `key = value` lines ('#' comments). `object = Class x y height` may repeat.
inline SceneSpec parse_scene_spec(std::string_view content) {
    SceneSpec s;
    std::size_t lineno = 0;
    for (auto raw : text::lines(content)) {
        ++lineno;
        auto line = text::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError("expected key = value", lineno);
        std::string key(text::trim(line.substr(0, eq)));
        auto value = text::trim(line.substr(eq + 1));
        auto num = [&]() {
            auto v = text::parse_double(value);
            if (!v) throw ParseError("bad number for '" + key + "'", lineno);
            return *v;
        };
        auto count = [&]() {
            double v = num();
            if (v < 0 || v != std::floor(v)) throw ParseError("'" + key + "' must be a non-negative integer", lineno);
            return static_cast<std::size_t>(v);
        };
        if (key == "object") {
            auto f = text::split_ws(value);
            if (f.size() != 4) throw ParseError("object needs 'Class x y height'", lineno);
            Placement p{std::string(f[0]), 0, 0, 0};
            double* dst[3] = {&p.x, &p.y, &p.height};
            for (int i = 0; i < 3; ++i) {
                auto v = text::parse_double(f[static_cast<std::size_t>(i) + 1]);
                if (!v) throw ParseError("bad number in object", lineno);
                *dst[i] = *v;
            }
            s.objects.push_back(p);
        } else if (key == "track_length") s.track_length = num();
        else if (key == "ground_width") s.ground_width = num();
        else if (key == "ground_density") s.ground_density = num();
        else if (key == "noise_sigma") s.noise_sigma = num();
        else if (key == "clutter_fraction") s.clutter_fraction = num();
        else if (key == "clutter_height") s.clutter_height = num();
        else if (key == "seed") s.seed = count();
        else if (key == "masts") s.masts = count();
        else if (key == "mast_spacing") s.mast_spacing = num();
        else if (key == "mast_offset") s.mast_offset = num();
        else if (key == "mast_y") s.mast_y = num();
        else if (key == "signals") s.signals = count();
        else if (key == "signal_spacing") s.signal_spacing = num();
        else if (key == "signal_offset") s.signal_offset = num();
        else if (key == "signal_y") s.signal_y = num();
        else if (key == "schaltanlagen") s.schaltanlagen = count();
        else if (key == "schaltanlage_spacing") s.schaltanlage_spacing = num();
        else if (key == "schaltanlage_offset") s.schaltanlage_offset = num();
        else if (key == "schaltanlage_y") s.schaltanlage_y = num();
        else if (key == "raised_patches") s.raised_patches = count();
        else if (key == "pole_density") s.pole_density = num();
        else if (key == "panel_density") s.panel_density = num();
        else if (key == "head_points") s.head_points = count();
        else if (key == "min_object_points") s.min_object_points = count();
        else throw ParseError("unknown scene key '" + key + "'", lineno);
    }
    s.validate();
    return s;
}

inline SceneSpec load_scene_spec(const std::string& path) { return parse_scene_spec(text::read_file(path)); }

// ---- generator ----------------------------------------------------------------------

namespace detail {

class Sampler {
public:
    explicit Sampler(std::uint64_t seed, double sigma) : rng_(seed), sigma_(sigma) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    double noise() { return sigma_ > 0 ? std::normal_distribution<double>(0.0, sigma_)(rng_) : 0.0; }

    /// Vertical pole of radius zero along z in [z0, z1]; noise in xy.
    void pole(PointCloud& out, double x, double y, double z0, double z1, double per_meter) {
        auto n = static_cast<std::size_t>(std::lround(per_meter * (z1 - z0)));
        for (std::size_t i = 0; i < n; ++i) {
            double z = uniform(z0, z1);
            double dx = noise(), dy = noise();
            out.push_back({x + dx, y + dy, z});
        }
    }

    /// Axis-aligned rectangle with normal along `axis`; noise along the normal.
    void panel(PointCloud& out, std::size_t axis, double at, Vec3 lo, Vec3 hi, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) {
            Vec3 p;
            for (std::size_t k = 0; k < 3; ++k) p[k] = k == axis ? at : uniform(lo[k], hi[k]);
            p[axis] += noise();
            out.push_back(p);
        }
    }

    std::size_t area_points(double density, double a, double b) const {
        return static_cast<std::size_t>(std::lround(density * a * b));
    }

private:
    std::mt19937_64 rng_;
    double sigma_;
};

inline double draw_height(Sampler& s, const std::string& cls) {
    if (cls == "BigMast") return s.uniform(6.5, 8.0);
    if (cls == "NormalMast") return s.uniform(5.2, 5.8);
    if (cls == "MainSignal" || cls == "DistantSignal") return s.uniform(4.3, 5.7);
    if (cls == "Schalthaus") return s.uniform(0.6, 0.9);
    if (cls == "SchaltSchrank") return s.uniform(0.3, 0.45);
    if (cls == "Vorsignalbake") return s.uniform(1.7, 2.3);
    if (cls == "Breakpoint_table") return s.uniform(1.2, 1.8);
    if (cls == "Chess_board") return s.uniform(1.1, 1.4);
    throw Error("cannot generate objects of class '" + cls + "'");
}

/// Points of one object and its nominal (noise-free) extent.
inline Box3 sample_object(Sampler& s, const SceneSpec& spec, const Placement& p, PointCloud& out) {
    const double x = p.x, y = p.y, h = p.height;
    const std::string& c = p.class_name;
    // Panels face the track (the plane y = const nearest to y = 0) unless stated otherwise.
    const double toward = y < 0 ? 1.0 : -1.0;
    if (c == "BigMast" || c == "NormalMast") {
        s.pole(out, x, y - 0.2, 0, h, spec.pole_density);
        s.pole(out, x, y + 0.2, 0, h, spec.pole_density);
        return Box3({x, y - 0.2, 0}, {x, y + 0.2, h});
    }
    if (c == "MainSignal" || c == "DistantSignal") {
        s.pole(out, x, y, 0, h, spec.pole_density);
        s.panel(out, 0, x, {x, y - 0.1, h - 0.5}, {x, y + 0.1, h}, spec.head_points);
        return Box3({x, y - 0.1, 0}, {x, y + 0.1, h});
    }
    if (c == "Vorsignalbake" || c == "Chess_board") {
        const double half = c == "Vorsignalbake" ? 0.25 : 0.25;
        const double tall = c == "Vorsignalbake" ? 0.6 : 0.5;
        s.pole(out, x, y, 0, h, spec.pole_density);
        s.panel(out, 0, x, {x, y - half, h - tall}, {x, y + half, h},
                s.area_points(spec.panel_density, 2 * half, tall));
        return Box3({x, y - half, 0}, {x, y + half, h});
    }
    if (c == "Breakpoint_table") {
        s.pole(out, x, y - 0.3, 0, h, spec.pole_density);
        s.pole(out, x, y + 0.3, 0, h, spec.pole_density);
        s.panel(out, 0, x, {x, y - 0.3, h - 0.4}, {x, y + 0.3, h}, s.area_points(spec.panel_density, 0.6, 0.4));
        return Box3({x, y - 0.3, 0}, {x, y + 0.3, h});
    }
    if (c == "Schalthaus") {
        const double front = y + toward * 0.3;
        s.panel(out, 1, front, {x - 0.6, 0, 0}, {x + 0.6, 0, h}, s.area_points(spec.panel_density, 1.2, h));
        s.panel(out, 2, h, {x - 0.6, y - 0.3, 0}, {x + 0.6, y + 0.3, 0}, s.area_points(spec.panel_density, 1.2, 0.6));
        return Box3({x - 0.6, y - 0.3, 0}, {x + 0.6, y + 0.3, h});
    }
    if (c == "SchaltSchrank") {
        s.panel(out, 1, y, {x - 0.3, 0, 0}, {x + 0.3, 0, h}, s.area_points(spec.panel_density, 0.6, h));
        return Box3({x - 0.3, y, 0}, {x + 0.3, y, h});
    }
    throw Error("cannot generate objects of class '" + c + "'");
}

inline Box3 pad(const Box3& b, double d) { return Box3(b.min - Vec3{d, d, d}, b.max + Vec3{d, d, d}); }

} // namespace detail

/// Placements implied by the procedural counts followed by the explicit ones. Heights of
/// procedural objects are drawn from each class's band with a safety margin.
inline std::vector<Placement> scene_placements(const SceneSpec& spec) {
    detail::Sampler s(splitmix64(spec.seed, 0x5EED), 0.0);
    std::vector<Placement> out;
    for (std::size_t i = 0; i < spec.masts; ++i) {
        std::string cls = i % 2 == 0 ? "BigMast" : "NormalMast";
        out.push_back({cls, spec.mast_offset + spec.mast_spacing * static_cast<double>(i), spec.mast_y,
                       detail::draw_height(s, cls)});
    }
    for (std::size_t i = 0; i < spec.signals; ++i) {
        out.push_back({"MainSignal", spec.signal_offset + spec.signal_spacing * static_cast<double>(i), spec.signal_y,
                       detail::draw_height(s, "MainSignal")});
    }
    for (std::size_t i = 0; i < spec.schaltanlagen; ++i) {
        std::string cls = i % 2 == 0 ? "Schalthaus" : "SchaltSchrank";
        out.push_back({cls, spec.schaltanlage_offset + spec.schaltanlage_spacing * static_cast<double>(i),
                       spec.schaltanlage_y, detail::draw_height(s, cls)});
    }
    for (const auto& p : spec.objects) {
        Placement q = p;
        if (!(q.height > 0)) q.height = detail::draw_height(s, q.class_name);
        out.push_back(q);
    }
    return out;
}

/// Deterministic for a fixed spec. Throws on placements whose footprints overlap, objects
/// outside the ground strip, or objects sampled too sparsely to be fitted.
inline Scene generate_scene(const SceneSpec& spec) {
    spec.validate();
    const auto placements = scene_placements(spec);
    detail::Sampler s(spec.seed, spec.noise_sigma);
    Scene scene;
    const double half_w = spec.ground_width / 2;
    const double padding = std::max(3 * spec.noise_sigma, 0.01);

    // Ground: one jittered sample per cell of a square grid.
    const double step = 1.0 / std::sqrt(spec.ground_density);
    const auto nx = static_cast<std::size_t>(std::ceil(spec.track_length / step));
    const auto ny = static_cast<std::size_t>(std::ceil(spec.ground_width / step));
    for (std::size_t i = 0; i < nx; ++i) {
        for (std::size_t j = 0; j < ny; ++j) {
            double x = std::min(spec.track_length, (static_cast<double>(i) + s.uniform(0, 1)) * step);
            double y = std::min(half_w, -half_w + (static_cast<double>(j) + s.uniform(0, 1)) * step);
            scene.cloud.push_back({x, y, s.noise()});
        }
    }

    for (std::size_t k = 0; k < placements.size(); ++k) {
        const auto& p = placements[k];
        PointCloud pts;
        Box3 nominal = detail::sample_object(s, spec, p, pts);
        Box3 truth_box = detail::pad(nominal, padding);
        if (truth_box.min.x < 0 || truth_box.max.x > spec.track_length || truth_box.min.y < -half_w ||
            truth_box.max.y > half_w) {
            throw Error("object " + p.class_name + " at x=" + text::format_double(p.x) + " leaves the ground strip");
        }
        if (pts.size() < spec.min_object_points) {
            throw Error("object " + p.class_name + " at x=" + text::format_double(p.x) + " has only " +
                        std::to_string(pts.size()) + " points");
        }
        std::size_t inside = 0;
        for (const auto& q : pts) inside += truth_box.contains(q) ? 1 : 0;
        if (static_cast<double>(inside) < 0.95 * static_cast<double>(pts.size())) {
            throw Error("truth box of " + p.class_name + " at x=" + text::format_double(p.x) +
                        " encloses fewer than 95% of its points");
        }
        for (const auto& other : scene.truth) {
            bool apart = truth_box.max.x < other.box.min.x || other.box.max.x < truth_box.min.x ||
                         truth_box.max.y < other.box.min.y || other.box.max.y < truth_box.min.y;
            if (!apart) {
                throw Error("overlapping placements: " + p.class_name + " at x=" + text::format_double(p.x) +
                            " and " + other.class_name + " at x=" + text::format_double(other.anchor.x));
            }
        }
        scene.truth.push_back({"truth_" + std::to_string(k + 1), p.class_name, truth_box, {p.x, p.y, 0}});
        scene.cloud.insert(scene.cloud.end(), pts.begin(), pts.end());
    }

    for (std::size_t k = 0; k < spec.raised_patches; ++k) {
        const double x = 60.0 + 120.0 * static_cast<double>(k);
        const double y = 4.5, h = 0.3;
        s.panel(scene.cloud, 2, h, {x - 1.0, y - 0.5, 0}, {x + 1.0, y + 0.5, 0}, s.area_points(spec.panel_density, 2.0, 1.0));
        s.panel(scene.cloud, 1, y - 0.5, {x - 1.0, 0, 0}, {x + 1.0, 0, h}, s.area_points(spec.panel_density, 2.0, h));
    }

    const double f = spec.clutter_fraction;
    const auto clutter = static_cast<std::size_t>(std::lround(f / (1.0 - f) * static_cast<double>(scene.cloud.size())));
    for (std::size_t i = 0; i < clutter; ++i) {
        scene.cloud.push_back({s.uniform(0, spec.track_length), s.uniform(-half_w, half_w), s.uniform(0, spec.clutter_height)});
    }
    return scene;
}

// ---- truth file -----------------------------------------------------------------------

inline std::string format_truth(const GroundTruth& truth) {
    std::string out = "# widop ground truth v1\n";
    for (const auto& t : truth) {
        out += "A\tclass\t" + t.id + "\t" + t.class_name + "\n";
        out += "A\tdata\t" + t.id + "\tanchorX\t" + text::format_double(t.anchor.x) + "\n";
        out += "A\tdata\t" + t.id + "\tanchorY\t" + text::format_double(t.anchor.y) + "\n";
        out += "A\tdata\t" + t.id + "\tanchorZ\t" + text::format_double(t.anchor.z) + "\n";
        const auto& b = t.box;
        out += "G\t" + t.id + "\tbox\t";
        for (double v : {b.min.x, b.min.y, b.min.z, b.max.x, b.max.y, b.max.z}) out += text::format_double(v) + ' ';
        out.back() = '\n';
    }
    return out;
}

inline GroundTruth parse_truth(std::string_view content) {
    std::map<std::string, TruthObject> by_id;
    std::vector<std::string> order;
    std::size_t lineno = 0;
    auto slot = [&](const std::string& id) -> TruthObject& {
        auto [it, fresh] = by_id.try_emplace(id);
        if (fresh) {
            it->second.id = id;
            order.push_back(id);
        }
        return it->second;
    };
    std::map<std::string, bool> boxed;
    for (auto raw : text::lines(content)) {
        ++lineno;
        std::string_view line = raw;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (text::trim(line).empty() || line.front() == '#') continue;
        auto f = text::split(line, '\t');
        if (f[0] == "C" || f[0] == "P") continue;
        if (f[0] == "A" && f.size() == 4 && f[1] == "class") {
            slot(std::string(f[2])).class_name = std::string(f[3]);
        } else if (f[0] == "A" && f.size() == 5 && f[1] == "data") {
            auto v = text::parse_double(f[4]);
            if (!v) throw ParseError("bad anchor value", lineno);
            auto& t = slot(std::string(f[2]));
            if (f[3] == "anchorX") t.anchor.x = *v;
            else if (f[3] == "anchorY") t.anchor.y = *v;
            else if (f[3] == "anchorZ") t.anchor.z = *v;
        } else if (f[0] == "G" && f.size() == 4 && f[2] == "box") {
            auto nums = text::split_ws(f[3]);
            if (nums.size() != 6) throw ParseError("box needs 6 numbers", lineno);
            double v[6];
            for (std::size_t i = 0; i < 6; ++i) {
                auto d = text::parse_double(nums[i]);
                if (!d) throw ParseError("bad box number", lineno);
                v[i] = *d;
            }
            try {
                slot(std::string(f[1])).box = Box3({v[0], v[1], v[2]}, {v[3], v[4], v[5]});
            } catch (const GeometryError& e) {
                throw ParseError(e.what(), lineno);
            }
            boxed[std::string(f[1])] = true;
        } else {
            throw ParseError("unexpected truth record", lineno);
        }
    }
    GroundTruth out;
    for (const auto& id : order) {
        const auto& t = by_id.at(id);
        if (t.class_name.empty()) throw ParseError("truth object '" + id + "' has no class", 0);
        if (!boxed.count(id)) throw ParseError("truth object '" + id + "' has no box", 0);
        out.push_back(t);
    }
    return out;
}

inline GroundTruth load_truth(const std::string& path) { return parse_truth(text::read_file(path)); }
inline void save_truth(const GroundTruth& truth, const std::string& path) { text::write_file(path, format_truth(truth)); }

} // namespace widop
