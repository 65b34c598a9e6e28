// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The widop Authors

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "widop/engine.hpp"
#include "widop/error.hpp"
#include "widop/geometry.hpp"
#include "widop/kb.hpp"

// Qualitative relations between axis-aligned boxes.
//
//   intersect(a, b)  overlap greater than overlap_epsilon on all three axes
//   touch(a, b)      not intersecting, and the gap between the boxes is at most touch_epsilon
//   upper(a, b)      a.min.z >= b.max.z - overlap_epsilon and the xy footprints overlap
//   connected(a, b)  intersect or touch
//   distance(a, b)   distance between centroids (optionally in the xy plane only)

namespace widop {

struct TopoConfig {
    double touch_epsilon = 0.1;
    double distance_tolerance = 0.10; // fraction of the target distance
    double overlap_epsilon = 1e-9;
    bool horizontal_distance = false;

    void validate() const {
        if (!(touch_epsilon > 0.0)) throw Error("touch-eps must be positive");
        if (!(overlap_epsilon > 0.0)) throw Error("overlap-eps must be positive");
        if (!(distance_tolerance > 0.0 && distance_tolerance < 1.0)) throw Error("distance-tol must lie in (0, 1)");
    }
};

inline constexpr const char* kRelationNames[] = {"Intersect", "Touch", "Upper", "Connected"};

inline double axis_overlap(const Box3& a, const Box3& b, std::size_t k) {
    return std::min(a.max[k], b.max[k]) - std::max(a.min[k], b.min[k]);
}

/// Euclidean distance between the closest points of two boxes (0 when they meet).
inline double box_gap(const Box3& a, const Box3& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
        double g = std::max(0.0, -axis_overlap(a, b, k));
        s += g * g;
    }
    return std::sqrt(s);
}

inline bool intersect(const Box3& a, const Box3& b, const TopoConfig& cfg = {}) {
    for (std::size_t k = 0; k < 3; ++k) {
        if (!(axis_overlap(a, b, k) > cfg.overlap_epsilon)) return false;
    }
    return true;
}

inline bool touch(const Box3& a, const Box3& b, const TopoConfig& cfg = {}) {
    return !intersect(a, b, cfg) && box_gap(a, b) <= cfg.touch_epsilon;
}

inline bool upper(const Box3& a, const Box3& b, const TopoConfig& cfg = {}) {
    return a.min.z >= b.max.z - cfg.overlap_epsilon && axis_overlap(a, b, 0) > cfg.overlap_epsilon &&
           axis_overlap(a, b, 1) > cfg.overlap_epsilon;
}

inline bool connected(const Box3& a, const Box3& b, const TopoConfig& cfg = {}) {
    return intersect(a, b, cfg) || touch(a, b, cfg);
}

inline double box_distance(const Box3& a, const Box3& b, const TopoConfig& cfg = {}) {
    Vec3 d = a.centroid() - b.centroid();
    if (cfg.horizontal_distance) d.z = 0.0;
    return norm(d);
}

inline bool is_distant_from(const Box3& a, const Box3& b, double target, const TopoConfig& cfg = {}) {
    if (!(target > 0.0)) throw GeometryError("target distance must be positive");
    return std::abs(box_distance(a, b, cfg) - target) <= cfg.distance_tolerance * target;
}

inline bool relation_holds(const std::string& name, const Box3& a, const Box3& b, const TopoConfig& cfg) {
    if (name == "Intersect") return intersect(a, b, cfg);
    if (name == "Touch") return touch(a, b, cfg);
    if (name == "Upper") return upper(a, b, cfg);
    if (name == "Connected") return connected(a, b, cfg);
    throw GeometryError("unknown relation '" + name + "'");
}

/// Asserts every holding relation over ordered pairs of boxed individuals; returns how many
/// assertions were new. Missing relation properties are declared as object properties.
inline std::size_t qualify_all(KnowledgeBase& kb, const TopoConfig& cfg = {}) {
    for (const char* name : kRelationNames) {
        if (!kb.property_kind(name)) kb.declare_property(name, PropertyKind::Object);
    }
    const auto ids = kb.boxed_individuals();
    std::size_t added = 0;
    for (const auto& a : ids) {
        const Box3& ba = *kb.geometry(a)->box;
        for (const auto& b : ids) {
            if (a == b) continue;
            const Box3& bb = *kb.geometry(b)->box;
            for (const char* name : kRelationNames) {
                if (relation_holds(name, ba, bb, cfg) && kb.assert_object(a, name, b)) ++added;
            }
        }
    }
    return added;
}

namespace detail {

inline const Box3* box_of(const KnowledgeBase& kb, const Node& n) {
    const auto* ind = std::get_if<Individual>(&n);
    if (!ind) return nullptr;
    const auto* rec = kb.geometry(ind->id);
    return rec && rec->box ? &*rec->box : nullptr;
}

} // namespace detail

/// topo:Intersect/2, topo:Touch/2, topo:Upper/2, topo:Connected/2, topo:isDistantFrom/3.
/// Arguments without a box make the filter fail.
inline void register_topology_builtins(RuleEngine& engine, const TopoConfig& cfg = {}) {
    for (const char* name : kRelationNames) {
        BuiltinDescriptor d;
        d.ns = "topo";
        d.name = name;
        d.arity = 2;
        d.filter = [cfg, relation = std::string(name)](const std::vector<Node>& a, BuiltinContext& ctx) {
            const Box3* x = detail::box_of(ctx.kb, a[0]);
            const Box3* y = detail::box_of(ctx.kb, a[1]);
            return x && y && relation_holds(relation, *x, *y, cfg);
        };
        engine.register_builtin(std::move(d));
    }
    BuiltinDescriptor d;
    d.ns = "topo";
    d.name = "isDistantFrom";
    d.arity = 3;
    d.filter = [cfg](const std::vector<Node>& a, BuiltinContext& ctx) {
        const Box3* x = detail::box_of(ctx.kb, a[0]);
        const Box3* y = detail::box_of(ctx.kb, a[1]);
        const auto* target = std::get_if<Literal>(&a[2]);
        if (!x || !y || !target || !target->is_number() || !(target->as_number() > 0.0)) return false;
        return is_distant_from(*x, *y, target->as_number(), cfg);
    };
    engine.register_builtin(std::move(d));
}

} // namespace widop
