// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The widop Authors

#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "widop/engine.hpp"
#include "widop/fitting.hpp"
#include "widop/kb.hpp"
#include "widop/pointcloud.hpp"

// Detection results live in the knowledge base:
//
//   Scene(s), hasPointCloudFile(s, "<path>")
//   processedBy(s, "<detector>")                  once a detector has run over the scene
//   Vertical_BoundingBox(b) | Horizontal_BoundingBox(b)
//   belongsToScene(b, s), detectedBy(b, "<detector>")
//   hasHeight, verticalLineCount, hasVerticalPlane, hasHorizontalPlane on b
//   box, lines and planes attached to b
//
// The markers make detection idempotent: a processed scene is never scanned again.

namespace widop {

inline constexpr const char* kVerticalDetector = "VerticalElementDetection";
inline constexpr const char* kHorizontalDetector = "HorizontalElementDetection";

enum class Orientation { Vertical, Horizontal };

inline const char* detector_name(Orientation o) { return o == Orientation::Vertical ? kVerticalDetector : kHorizontalDetector; }

inline const char* box_concept(Orientation o) {
    return o == Orientation::Vertical ? "Vertical_BoundingBox" : "Horizontal_BoundingBox";
}

/// Per-segment measurements that end up as data assertions.
struct SegmentFeatures {
    Box3 box;
    double height = 0.0;
    std::vector<Line3> lines;
    std::vector<PlaneDetection> planes;
    std::size_t vertical_lines = 0;
    bool vertical_plane = false;
    bool horizontal_plane = false;
};

inline SegmentFeatures analyze_segment(const PointCloud& sub, const DetectorConfig& cfg) {
    SegmentFeatures f;
    f.box = bounding_box(sub);
    f.height = approximate_height(sub);
    PointCloud raised;
    for (const auto& p : sub) {
        if (p.z - f.box.min.z >= cfg.feature_clearance) raised.push_back(p);
    }
    f.lines = ransac_lines_3d(raised, cfg);
    f.vertical_lines = static_cast<std::size_t>(std::count_if(
        f.lines.begin(), f.lines.end(), [&](const Line3& l) { return is_vertical(l, cfg.vertical_tolerance_deg); }));
    DetectorConfig plane_cfg = cfg;
    plane_cfg.seed = splitmix64(cfg.seed, 0xF1A7);
    f.planes = ransac_planes_3d(raised, plane_cfg);
    for (const auto& p : f.planes) {
        if (is_vertical_plane(p.plane, cfg.vertical_tolerance_deg)) f.vertical_plane = true;
        if (is_horizontal_plane(p.plane, cfg.vertical_tolerance_deg) &&
            p.centroid.z - f.box.min.z >= cfg.min_plane_elevation) {
            f.horizontal_plane = true;
        }
    }
    return f;
}

/// Scene individual for `path`, created (as `Scene_<n>`) when missing.
inline std::string ensure_scene(KnowledgeBase& kb, const std::string& path) {
    for (const auto& a : kb.with_predicate("hasPointCloudFile")) {
        if (std::get<Literal>(*a.object) == Literal::text(path) && kb.is_instance_of(a.subject, "Scene")) return a.subject;
    }
    auto id = kb.mint("Scene", "Scene");
    kb.assert_data(id, "hasPointCloudFile", Literal::text(path));
    return id;
}

inline bool scene_processed(const KnowledgeBase& kb, const std::string& scene, Orientation o) {
    return kb.contains(Assertion::data_of(scene, "processedBy", Literal::text(detector_name(o))));
}

/// Geometry individuals a detector produced for `scene`, in id order.
inline std::vector<std::string> detected_individuals(const KnowledgeBase& kb, const std::string& scene, Orientation o) {
    std::vector<std::string> out;
    for (const auto& a : kb.with_predicate("belongsToScene")) {
        if (std::get<Individual>(*a.object).id != scene) continue;
        if (kb.contains(Assertion::data_of(a.subject, "detectedBy", Literal::text(detector_name(o))))) {
            out.push_back(a.subject);
        }
    }
    return out;
}

/// Runs one detector over `cloud` (after the isolated-point filter) and records every seed
/// as a new geometry individual. Does nothing for an already processed scene. Returns the
/// number of individuals created.
inline std::size_t detect_into_kb(KnowledgeBase& kb, const std::string& scene, const PointCloud& raw, Orientation o,
                                  const DetectorConfig& cfg) {
    if (scene_processed(kb, scene, o)) return 0;
    const PointCloud cloud = remove_isolated_points(raw, cfg.outlier_radius, cfg.outlier_min_neighbors);
    const auto seeds = o == Orientation::Vertical ? detect_vertical_elements(cloud, cfg) : detect_horizontal_elements(cloud, cfg);
    const std::uint64_t stream = splitmix64(cfg.seed, o == Orientation::Vertical ? 1 : 2);
    std::size_t made = 0;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        const auto sub = segment_2d(cloud, seeds[i], cfg);
        if (sub.empty()) continue;
        DetectorConfig local = cfg;
        local.seed = splitmix64(stream, i);
        const auto f = analyze_segment(sub, local);

        const auto id = kb.mint(detector_name(o), box_concept(o));
        kb.attach_box(id, f.box);
        for (const auto& l : f.lines) kb.attach_line(id, l);
        for (const auto& p : f.planes) kb.attach_plane(id, p.plane);
        kb.assert_object(id, "belongsToScene", scene);
        kb.assert_data(id, "detectedBy", Literal::text(detector_name(o)));
        kb.assert_data(id, "hasHeight", Literal::number(f.height));
        kb.assert_data(id, "verticalLineCount", Literal::number(static_cast<double>(f.vertical_lines)));
        kb.assert_data(id, "hasVerticalPlane", Literal::boolean(f.vertical_plane));
        kb.assert_data(id, "hasHorizontalPlane", Literal::boolean(f.horizontal_plane));
        ++made;
    }
    kb.assert_data(scene, "processedBy", Literal::text(detector_name(o)));
    return made;
}

/// Clouds by path, loaded on first use, shared by the detection built-ins.
class CloudCache {
public:
    void put(const std::string& path, PointCloud cloud) { clouds_[path] = std::move(cloud); }

    const PointCloud& get(const std::string& path) {
        auto it = clouds_.find(path);
        if (it == clouds_.end()) it = clouds_.emplace(path, load_cloud(path)).first;
        return it->second;
    }

private:
    std::map<std::string, PointCloud> clouds_;
};

namespace detail {

inline const GeometryRecord* record_of(const KnowledgeBase& kb, const Node& n) {
    const auto* ind = std::get_if<Individual>(&n);
    return ind ? kb.geometry(ind->id) : nullptr;
}

inline std::optional<double> number_of(const Node& n) {
    const auto* lit = std::get_if<Literal>(&n);
    if (!lit || !lit->is_number()) return std::nullopt;
    return lit->as_number();
}

inline BuiltinDescriptor detection_builtin(Orientation o, DetectorConfig cfg, std::shared_ptr<CloudCache> cache) {
    BuiltinDescriptor d;
    d.ns = "proc3d";
    d.name = detector_name(o);
    d.kind = BuiltinKind::Generative;
    d.arity = 2;
    d.may_be_unbound = {true, true};
    d.generate = [o, cfg, cache](const BuiltinArgs& args, BuiltinContext& ctx) -> std::vector<std::vector<Node>> {
        auto& kb = ctx.kb;
        std::vector<std::pair<std::string, Literal>> scenes;
        for (const auto& a : kb.with_predicate("hasPointCloudFile")) {
            const auto& path = std::get<Literal>(*a.object);
            if (!path.is_text() || !kb.is_instance_of(a.subject, "Scene")) continue;
            if (args[1] && *args[1] != Node{path}) continue;
            scenes.emplace_back(a.subject, path);
        }
        std::vector<std::vector<Node>> out;
        for (const auto& [scene, path] : scenes) {
            if (!scene_processed(kb, scene, o)) detect_into_kb(kb, scene, cache->get(path.as_text()), o, cfg);
            for (const auto& id : detected_individuals(kb, scene, o)) {
                Node v = Individual{id};
                if (args[0] && *args[0] != v) continue;
                out.push_back({v, Node{path}});
            }
        }
        return out;
    };
    return d;
}

} // namespace detail

/// proc3d:{VerticalElementDetection/2, HorizontalElementDetection/2} (generative, run the
/// detector once per scene), proc3d:ApproximateHeight/2 and proc3d:VerticalLineCount/2
/// (generative in the second position), proc3d:FrontFaceDetection/1,
/// proc3d:CheckParallel/2 and proc3d:CheckPerpendicular/2 (filters; second argument is the
/// tolerance in degrees, true when any pair of the individual's lines qualifies).
inline void register_processing_builtins(RuleEngine& engine, const DetectorConfig& cfg,
                                         std::shared_ptr<CloudCache> cache = std::make_shared<CloudCache>()) {
    engine.register_builtin(detail::detection_builtin(Orientation::Vertical, cfg, cache));
    engine.register_builtin(detail::detection_builtin(Orientation::Horizontal, cfg, cache));

    auto measure = [](std::string name, std::function<std::optional<double>(const GeometryRecord&)> f) {
        BuiltinDescriptor d;
        d.ns = "proc3d";
        d.name = std::move(name);
        d.kind = BuiltinKind::Generative;
        d.arity = 2;
        d.may_be_unbound = {false, true};
        d.generate = [f = std::move(f)](const BuiltinArgs& args, BuiltinContext& ctx) -> std::vector<std::vector<Node>> {
            const auto* rec = detail::record_of(ctx.kb, *args[0]);
            if (!rec) return {};
            auto v = f(*rec);
            if (!v) return {};
            Node value = Literal::number(*v);
            if (args[1] && *args[1] != value) return {};
            return {{*args[0], value}};
        };
        return d;
    };
    engine.register_builtin(measure("ApproximateHeight", [](const GeometryRecord& r) -> std::optional<double> {
        if (!r.box) return std::nullopt;
        return r.box->height();
    }));
    const double tol = cfg.vertical_tolerance_deg;
    engine.register_builtin(measure("VerticalLineCount", [tol](const GeometryRecord& r) -> std::optional<double> {
        return static_cast<double>(
            std::count_if(r.lines.begin(), r.lines.end(), [&](const Line3& l) { return is_vertical(l, tol); }));
    }));

    BuiltinDescriptor face;
    face.ns = "proc3d";
    face.name = "FrontFaceDetection";
    face.arity = 1;
    face.filter = [tol](const std::vector<Node>& a, BuiltinContext& ctx) {
        const auto* rec = detail::record_of(ctx.kb, a[0]);
        return rec && std::any_of(rec->planes.begin(), rec->planes.end(),
                                  [&](const Plane3& p) { return is_vertical_plane(p, tol); });
    };
    engine.register_builtin(std::move(face));

    auto pairwise = [](std::string name, bool parallel) {
        BuiltinDescriptor d;
        d.ns = "proc3d";
        d.name = std::move(name);
        d.arity = 2;
        d.filter = [parallel](const std::vector<Node>& a, BuiltinContext& ctx) {
            const auto* rec = detail::record_of(ctx.kb, a[0]);
            auto t = detail::number_of(a[1]);
            if (!rec || !t) return false;
            for (std::size_t i = 0; i < rec->lines.size(); ++i) {
                for (std::size_t j = i + 1; j < rec->lines.size(); ++j) {
                    auto r = parallel ? check_parallel(rec->lines[i], rec->lines[j], *t)
                                      : check_perpendicular(rec->lines[i], rec->lines[j], *t);
                    if (r.holds) return true;
                }
            }
            return false;
        };
        return d;
    };
    engine.register_builtin(pairwise("CheckParallel", true));
    engine.register_builtin(pairwise("CheckPerpendicular", false));
}

} // namespace widop
