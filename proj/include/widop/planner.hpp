// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The widop Authors

#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "widop/error.hpp"
#include "widop/kb.hpp"

namespace widop {

enum class DataKind { PointCloud, Point_2D, SubPointCloud, Line_3D, Point_3D, number, Boolean, angle };

inline constexpr std::array<std::string_view, 8> kDataKindNames = {
    "PointCloud", "Point_2D", "SubPointCloud", "Line_3D", "Point_3D", "number", "Boolean", "angle"};

inline std::string_view to_string(DataKind k) { return kDataKindNames[static_cast<std::size_t>(k)]; }

inline std::optional<DataKind> parse_data_kind(std::string_view s) {
    for (std::size_t i = 0; i < kDataKindNames.size(); ++i) {
        if (kDataKindNames[i] == s) return static_cast<DataKind>(i);
    }
    return std::nullopt;
}

/// Closed set of characteristic tags an algorithm can be designed for.
inline const std::set<std::string>& characteristic_tags() {
    static const std::set<std::string> tags = {"vertical geometry",      "geometry height",   "3D lines",
                                               "front face",             "perpendicular elements",
                                               "parallel elements",      "horizontal geometry"};
    return tags;
}

struct AlgorithmDescriptor {
    std::string name;
    std::set<DataKind> inputs;
    std::set<DataKind> outputs;
    std::set<std::string> designed_for;
    /// The algorithm this one must follow.
    std::optional<std::string> successor;

    friend bool operator==(const AlgorithmDescriptor&, const AlgorithmDescriptor&) = default;
};

struct CharacteristicProfile {
    std::string concept_name;
    std::set<std::string> characteristics;
};

struct PlanEdge {
    std::string producer;
    std::string consumer;
    DataKind kind = DataKind::PointCloud;
    friend bool operator==(const PlanEdge&, const PlanEdge&) = default;
};

struct ExecutionPlan {
    std::vector<std::string> steps;
    std::vector<PlanEdge> edges;
};

/// Algorithms in registration (row) order; names are unique.
class AlgorithmRegistry {
public:
    AlgorithmRegistry() = default;
    explicit AlgorithmRegistry(std::vector<AlgorithmDescriptor> rows) {
        for (auto& r : rows) add(std::move(r));
    }

    void add(AlgorithmDescriptor d) {
        if (d.name.empty()) throw PlanError("algorithm needs a name");
        if (index_.count(d.name)) throw PlanError("algorithm '" + d.name + "' already registered");
        index_[d.name] = rows_.size();
        rows_.push_back(std::move(d));
    }

    /// Every successor names a registered algorithm.
    void validate() const {
        for (const auto& r : rows_) {
            if (r.successor && !index_.count(*r.successor)) {
                throw PlanError("algorithm '" + r.name + "' follows unknown algorithm '" + *r.successor + "'");
            }
        }
    }

    const std::vector<AlgorithmDescriptor>& rows() const { return rows_; }
    std::size_t size() const { return rows_.size(); }
    bool empty() const { return rows_.empty(); }
    bool contains(const std::string& name) const { return index_.count(name) != 0; }
    std::size_t row_of(const std::string& name) const { return index_.at(name); }

    const AlgorithmDescriptor& at(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) throw PlanError("unknown algorithm '" + name + "'");
        return rows_[it->second];
    }

private:
    std::vector<AlgorithmDescriptor> rows_;
    std::map<std::string, std::size_t> index_;
};

/// The eight processing algorithms with their data kinds, purposes and ordering.
inline AlgorithmRegistry default_registry() {
    using K = DataKind;
    return AlgorithmRegistry({
        {"VerticalObjectsDetection", {K::PointCloud}, {K::Point_2D}, {"vertical geometry"}, std::nullopt},
        {"Segmentation2D", {K::Point_2D, K::PointCloud}, {K::SubPointCloud}, {"vertical geometry"},
         "VerticalObjectsDetection"},
        {"BoundingBox", {K::SubPointCloud}, {K::Point_3D}, {"vertical geometry"}, "Segmentation2D"},
        {"ApproximateHeight", {K::SubPointCloud}, {K::number}, {"geometry height"}, "Segmentation2D"},
        {"RANSACLineDetection", {K::SubPointCloud}, {K::Line_3D}, {"3D lines"}, "Segmentation2D"},
        {"FrontFaceDetection", {K::SubPointCloud}, {K::Boolean}, {"front face"}, "Segmentation2D"},
        {"CheckPerpendicular", {K::Line_3D}, {K::Boolean, K::angle}, {"perpendicular elements"},
         "RANSACLineDetection"},
        {"CheckParallel", {K::Line_3D}, {K::Boolean, K::angle}, {"parallel elements"}, "RANSACLineDetection"},
    });
}

/// Algorithms whose purposes meet the profile, closed under successors and input producers.
/// Names are returned in registry order.
inline std::vector<std::string> select_algorithms(const CharacteristicProfile& profile, const AlgorithmRegistry& reg) {
    reg.validate();
    std::set<std::string> chosen;
    std::vector<std::string> todo;
    for (const auto& r : reg.rows()) {
        bool match = std::any_of(r.designed_for.begin(), r.designed_for.end(),
                                 [&](const std::string& t) { return profile.characteristics.count(t) != 0; });
        if (match && chosen.insert(r.name).second) todo.push_back(r.name);
    }
    while (!todo.empty()) {
        auto name = todo.back();
        todo.pop_back();
        const auto& d = reg.at(name);
        if (d.successor && chosen.insert(*d.successor).second) todo.push_back(*d.successor);
        for (DataKind in : d.inputs) {
            if (in == DataKind::PointCloud) continue;
            bool produced = std::any_of(chosen.begin(), chosen.end(),
                                        [&](const std::string& c) { return reg.at(c).outputs.count(in) != 0; });
            if (produced) continue;
            for (const auto& r : reg.rows()) {
                if (r.outputs.count(in)) {
                    if (chosen.insert(r.name).second) todo.push_back(r.name);
                    break;
                }
            }
        }
    }
    std::vector<std::string> out(chosen.begin(), chosen.end());
    std::sort(out.begin(), out.end(), [&](const auto& a, const auto& b) { return reg.row_of(a) < reg.row_of(b); });
    return out;
}

/// Orders `selected` so every step follows its successor constraint and the producers of its
/// inputs. Ready steps are taken in registry order, then by name.
inline ExecutionPlan build_plan(const std::vector<std::string>& selected, const AlgorithmRegistry& reg) {
    reg.validate();
    std::set<std::string> chosen(selected.begin(), selected.end());
    std::map<std::string, std::set<std::string>> before; // step -> steps it waits for
    ExecutionPlan plan;
    for (const auto& name : chosen) {
        const auto& d = reg.at(name);
        auto& deps = before[name];
        if (d.successor) {
            if (!chosen.count(*d.successor)) {
                throw PlanError("'" + name + "' must follow '" + *d.successor + "', which is not selected");
            }
            deps.insert(*d.successor);
        }
        for (DataKind in : d.inputs) {
            if (in == DataKind::PointCloud) continue;
            bool any = false;
            for (const auto& other : chosen) {
                if (other == name || !reg.at(other).outputs.count(in)) continue;
                any = true;
                deps.insert(other);
                plan.edges.push_back({other, name, in});
            }
            if (!any) {
                throw PlanError("input " + std::string(to_string(in)) + " of '" + name + "' is produced by no selected step");
            }
        }
    }

    auto rank = [&](const std::string& n) { return std::make_pair(reg.row_of(n), n); };
    std::set<std::pair<std::size_t, std::string>> ready;
    std::map<std::string, std::size_t> waiting;
    for (const auto& [name, deps] : before) {
        waiting[name] = deps.size();
        if (deps.empty()) ready.insert(rank(name));
    }
    while (!ready.empty()) {
        auto [row, name] = *ready.begin();
        ready.erase(ready.begin());
        plan.steps.push_back(name);
        for (const auto& [other, deps] : before) {
            if (deps.count(name) && --waiting[other] == 0) ready.insert(rank(other));
        }
    }
    if (plan.steps.size() != chosen.size()) {
        std::string stuck;
        for (const auto& [name, n] : waiting) {
            if (n > 0) stuck += (stuck.empty() ? "" : ", ") + name;
        }
        throw PlanError("cycle among ordering constraints: " + stuck);
    }
    std::sort(plan.edges.begin(), plan.edges.end(), [&](const PlanEdge& a, const PlanEdge& b) {
        return std::make_tuple(reg.row_of(a.consumer), reg.row_of(a.producer), a.kind) <
               std::make_tuple(reg.row_of(b.consumer), reg.row_of(b.producer), b.kind);
    });
    return plan;
}

inline std::string format_plan(const std::string& concept_name, const ExecutionPlan& plan) {
    std::string out = "plan for " + concept_name + ":\n";
    for (std::size_t i = 0; i < plan.steps.size(); ++i) out += "  " + std::to_string(i + 1) + ". " + plan.steps[i] + "\n";
    if (!plan.edges.empty()) out += "dataflow:\n";
    for (const auto& e : plan.edges) {
        out += "  " + e.producer + " -> " + e.consumer + " [" + std::string(to_string(e.kind)) + "]\n";
    }
    return out;
}

// ---- knowledge-base storage ---------------------------------------------------------
//
// Algorithms are individuals of `Algorithm`; profiles are individuals of `Characteristics`.

inline constexpr const char* kAlgorithmConcept = "Algorithm";
inline constexpr const char* kCharacteristicsConcept = "Characteristics";

/// Declares the vocabulary used to store registries and profiles, skipping what exists.
inline void declare_planner_vocabulary(KnowledgeBase& kb) {
    if (!kb.has_concept(kAlgorithmConcept)) kb.declare_concept(kAlgorithmConcept);
    if (!kb.has_concept(kCharacteristicsConcept)) kb.declare_concept(kCharacteristicsConcept);
    for (const char* p : {"hasInput", "hasOutput", "isDesignedFor", "registryRow", "characterizes",
                          "requiresCharacteristic"}) {
        if (!kb.property_kind(p)) kb.declare_property(p, PropertyKind::Data);
    }
    if (!kb.property_kind("hasSuccessor")) kb.declare_property("hasSuccessor", PropertyKind::Object);
}

inline void store_registry(KnowledgeBase& kb, const AlgorithmRegistry& reg) {
    declare_planner_vocabulary(kb);
    for (std::size_t row = 0; row < reg.size(); ++row) {
        const auto& d = reg.rows()[row];
        kb.assert_class(d.name, kAlgorithmConcept);
        kb.assert_data(d.name, "registryRow", Literal::number(static_cast<double>(row)));
        for (auto k : d.inputs) kb.assert_data(d.name, "hasInput", Literal::text(std::string(to_string(k))));
        for (auto k : d.outputs) kb.assert_data(d.name, "hasOutput", Literal::text(std::string(to_string(k))));
        for (const auto& t : d.designed_for) kb.assert_data(d.name, "isDesignedFor", Literal::text(t));
        if (d.successor) kb.assert_object(d.name, "hasSuccessor", *d.successor);
    }
}

/// Registry stored in `kb`, ordered by `registryRow` then name; empty when none is stored.
inline AlgorithmRegistry load_registry(const KnowledgeBase& kb) {
    AlgorithmRegistry reg;
    if (!kb.has_concept(kAlgorithmConcept)) return reg;
    std::vector<std::pair<double, std::string>> order;
    for (const auto& a : kb.query({AssertionKind::Class, std::nullopt, std::string(kAlgorithmConcept), std::nullopt})) {
        auto row = kb.data_value(a.subject, "registryRow");
        order.emplace_back(row && row->is_number() ? row->as_number() : 1e300, a.subject);
    }
    std::sort(order.begin(), order.end());
    order.erase(std::unique(order.begin(), order.end()), order.end());
    auto kinds = [&](const std::string& id, const char* prop) {
        std::set<DataKind> out;
        for (const auto& v : kb.data_values(id, prop)) {
            auto k = v.is_text() ? parse_data_kind(v.as_text()) : std::nullopt;
            if (!k) throw PlanError("algorithm '" + id + "' has a bad " + prop + " value " + v.to_text());
            out.insert(*k);
        }
        return out;
    };
    for (const auto& [row, id] : order) {
        AlgorithmDescriptor d;
        d.name = id;
        d.inputs = kinds(id, "hasInput");
        d.outputs = kinds(id, "hasOutput");
        for (const auto& v : kb.data_values(id, "isDesignedFor")) {
            if (v.is_text()) d.designed_for.insert(v.as_text());
        }
        auto succ = kb.object_values(id, "hasSuccessor");
        if (succ.size() > 1) throw PlanError("algorithm '" + id + "' has several successors");
        if (!succ.empty()) d.successor = succ.front();
        reg.add(std::move(d));
    }
    return reg;
}

inline void store_profile(KnowledgeBase& kb, const CharacteristicProfile& p) {
    declare_planner_vocabulary(kb);
    const std::string id = "Profile_" + p.concept_name;
    kb.assert_class(id, kCharacteristicsConcept);
    kb.assert_data(id, "characterizes", Literal::text(p.concept_name));
    for (const auto& c : p.characteristics) kb.assert_data(id, "requiresCharacteristic", Literal::text(c));
}

/// Profile of `concept_name`, or of its nearest ancestor that has one.
inline std::optional<CharacteristicProfile> find_profile(const KnowledgeBase& kb, const std::string& concept_name) {
    if (!kb.has_concept(kCharacteristicsConcept) || !kb.property_kind("characterizes")) return std::nullopt;
    for (const auto& c : kb.ancestors(concept_name)) {
        for (const auto& a : kb.with_predicate("characterizes")) {
            if (std::get<Literal>(*a.object) != Literal::text(c)) continue;
            CharacteristicProfile p{concept_name, {}};
            for (const auto& v : kb.data_values(a.subject, "requiresCharacteristic")) {
                if (v.is_text()) p.characteristics.insert(v.as_text());
            }
            return p;
        }
    }
    return std::nullopt;
}

/// Plan for `concept_name` from the registry and profiles stored in `kb`.
inline ExecutionPlan plan_for(const KnowledgeBase& kb, const std::string& concept_name) {
    if (!kb.has_concept(concept_name)) throw KbError("unknown concept '" + concept_name + "'");
    auto profile = find_profile(kb, concept_name);
    if (!profile) throw PlanError("no characteristic profile covers '" + concept_name + "'");
    const auto reg = load_registry(kb);
    return build_plan(select_algorithms(*profile, reg), reg);
}

} // namespace widop
