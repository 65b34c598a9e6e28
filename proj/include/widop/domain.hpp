// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The widop Authors

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "widop/kb.hpp"
#include "widop/kb_io.hpp"
#include "widop/planner.hpp"

// Railway domain pack: concept tree, data vocabulary, height bands, geometric restrictions,
// spacing constants, the algorithm registry with characteristic profiles, and the default
// annotation rules.

namespace widop {

struct HeightBand {
    std::string concept_name;
    double min = 0.0;                 // exclusive lower bound
    std::optional<double> max;        // inclusive upper bound; open above when absent
};

struct Restriction {
    std::string concept_name;
    std::optional<std::pair<int, int>> vertical_lines; // inclusive range
    int vertical_planes = 0;
    int horizontal_planes = 0;
};

struct Spacing {
    std::string id;
    std::string from;
    std::string to;
    double meters = 0.0;
};

inline const std::vector<HeightBand>& height_bands() {
    static const std::vector<HeightBand> bands = {
        {"MainSignal", 4, 6},     {"DistantSignal", 4, 6},   {"Vorsignalbake", 1.5, 2.5},
        {"Breakpoint_table", 1, 2}, {"Chess_board", 1, 1.5}, {"BigMast", 6, std::nullopt},
        {"NormalMast", 5, 6},     {"Schalthaus", 0, 1},      {"SchaltSchrank", 0, 0.5},
    };
    return bands;
}

inline const std::vector<Restriction>& restrictions() {
    static const std::vector<Restriction> rows = {
        {"MainSignal", std::pair{1, 2}, 0, 0},      {"DistantSignal", std::pair{1, 2}, 0, 0},
        {"Vorsignalbake", std::pair{1, 1}, 1, 0},   {"Breakpoint_table", std::pair{2, 2}, 1, 0},
        {"Chess_board", std::pair{1, 1}, 1, 0},     {"BigMast", std::pair{2, 4}, 0, 0},
        {"NormalMast", std::pair{2, 4}, 0, 0},      {"Schalthaus", std::nullopt, 1, 1},
        {"SchaltSchrank", std::nullopt, 1, 0},
    };
    return rows;
}

inline const std::vector<Spacing>& spacings() {
    static const std::vector<Spacing> rows = {
        {"Spacing_MastMast", "Mast", "Mast", 50},
        {"Spacing_VorsignalbakeChain", "Vorsignalbake", "Vorsignalbake", 75},
        {"Spacing_VorsignalbakeDistantSignal", "Vorsignalbake", "DistantSignal", 100},
        {"Spacing_DistantMain", "DistantSignal", "MainSignal", 1000},
        {"Spacing_DistantMainShort", "DistantSignal", "MainSignal", 700},
    };
    return rows;
}

/// Default algorithms plus the horizontal detection root.
inline AlgorithmRegistry domain_registry() {
    AlgorithmRegistry reg = default_registry();
    reg.add({"HorizontalObjectsDetection", {DataKind::PointCloud}, {DataKind::Point_2D}, {"horizontal geometry"},
             std::nullopt});
    return reg;
}

inline std::vector<CharacteristicProfile> domain_profiles() {
    return {
        {"Mast", {"vertical geometry", "geometry height", "3D lines"}},
        {"Signals", {"vertical geometry", "geometry height", "3D lines", "front face"}},
        {"Schaltanlage", {"horizontal geometry", "geometry height", "front face"}},
    };
}

/// Adds the pack to `kb`; any name already declared there is an error.
inline void load_domain_pack(KnowledgeBase& kb) {
    const std::vector<std::pair<const char*, const char*>> concepts = {
        {"Algorithm", nullptr},
        {"Geometry", nullptr},
        {"Vertical_BoundingBox", "Geometry"},
        {"Horizontal_BoundingBox", "Geometry"},
        {"DomainConcept", nullptr},
        {"Signals", "DomainConcept"},
        {"BasicSignals", "Signals"},
        {"MainSignal", "BasicSignals"},
        {"DistantSignal", "BasicSignals"},
        {"SecondarySignal", "Signals"},
        {"Vorsignalbake", "SecondarySignal"},
        {"Breakpoint_table", "SecondarySignal"},
        {"Chess_board", "SecondarySignal"},
        {"Mast", "DomainConcept"},
        {"BigMast", "Mast"},
        {"NormalMast", "Mast"},
        {"Schaltanlage", "DomainConcept"},
        {"Schalthaus", "Schaltanlage"},
        {"SchaltSchrank", "Schaltanlage"},
        {"Characteristics", nullptr},
        {"HeightBand", "Characteristics"},
        {"GeometricRestriction", "Characteristics"},
        {"SpacingConstant", "Characteristics"},
        {"Scene", nullptr},
    };
    for (const auto& [name, parent] : concepts) {
        kb.declare_concept(name, parent ? std::optional<std::string>(parent) : std::nullopt);
    }
    for (const char* p : {"hasHeight", "verticalLineCount", "hasVerticalPlane", "hasHorizontalPlane",
                          "hasPointCloudFile", "hasPointCount", "detectedBy", "processedBy", "hasColor", "hasTexture",
                          "appliesTo", "minHeight", "maxHeight", "minVerticalLines", "maxVerticalLines",
                          "verticalPlanes", "horizontalPlanes", "spacingFrom", "spacingTo", "spacingMeters"}) {
        kb.declare_property(p, PropertyKind::Data);
    }
    for (const char* p : {"belongsToScene", "Intersect", "Touch", "Upper", "Connected"}) {
        kb.declare_property(p, PropertyKind::Object);
    }
    declare_planner_vocabulary(kb);

    for (const auto& b : height_bands()) {
        const std::string id = "Band_" + b.concept_name;
        kb.assert_class(id, "HeightBand");
        kb.assert_data(id, "appliesTo", Literal::text(b.concept_name));
        kb.assert_data(id, "minHeight", Literal::number(b.min));
        if (b.max) kb.assert_data(id, "maxHeight", Literal::number(*b.max));
    }
    for (const auto& r : restrictions()) {
        const std::string id = "Restriction_" + r.concept_name;
        kb.assert_class(id, "GeometricRestriction");
        kb.assert_data(id, "appliesTo", Literal::text(r.concept_name));
        if (r.vertical_lines) {
            kb.assert_data(id, "minVerticalLines", Literal::number(r.vertical_lines->first));
            kb.assert_data(id, "maxVerticalLines", Literal::number(r.vertical_lines->second));
        }
        kb.assert_data(id, "verticalPlanes", Literal::number(r.vertical_planes));
        kb.assert_data(id, "horizontalPlanes", Literal::number(r.horizontal_planes));
    }
    for (const auto& s : spacings()) {
        kb.assert_class(s.id, "SpacingConstant");
        kb.assert_data(s.id, "spacingFrom", Literal::text(s.from));
        kb.assert_data(s.id, "spacingTo", Literal::text(s.to));
        kb.assert_data(s.id, "spacingMeters", Literal::number(s.meters));
    }
    store_registry(kb, domain_registry());
    for (const auto& p : domain_profiles()) store_profile(kb, p);
}

inline KnowledgeBase domain_kb() {
    KnowledgeBase kb;
    load_domain_pack(kb);
    return kb;
}

/// The pack in knowledge-base file form (the shipped `db_domain.kb`).
inline std::string domain_pack_text() { return serialize(domain_kb()); }

/// Annotation rules (the shipped `db_default.rules`).
inline std::string default_rules() {
    return R"(// Default annotation rules for the railway domain pack.
// Height bands are (min, max]; line counts refer to near-vertical lines.

// Tall vertical elements are big masts.
rule BigMastByHeight: proc3d:VerticalElementDetection(?v, ?dir) ^ hasHeight(?v, ?h) ^ swrlb:greaterThan(?h, 6)
    -> BigMast(?v)

rule NormalMastByShape: Vertical_BoundingBox(?v) ^ hasHeight(?v, ?h) ^ swrlb:greaterThan(?h, 5)
    ^ swrlb:lessThanOrEqual(?h, 6) ^ verticalLineCount(?v, ?n) ^ swrlb:greaterThanOrEqual(?n, 2)
    -> NormalMast(?v)

// Main and distant signals look alike; only the signal group is decided here.
rule BasicSignalByShape: Vertical_BoundingBox(?v) ^ hasHeight(?v, ?h) ^ swrlb:greaterThan(?h, 4)
    ^ swrlb:lessThanOrEqual(?h, 6) ^ verticalLineCount(?v, ?n) ^ swrlb:greaterThanOrEqual(?n, 1)
    ^ swrlb:lessThanOrEqual(?n, 2) ^ hasVerticalPlane(?v, false)
    -> BasicSignals(?v)

rule DistantSignalBeforeMain: BasicSignals(?d) ^ MainSignal(?m) ^ topo:isDistantFrom(?d, ?m, 1000)
    -> DistantSignal(?d)

rule DistantSignalBeforeMainShort: BasicSignals(?d) ^ MainSignal(?m) ^ topo:isDistantFrom(?d, ?m, 700)
    -> DistantSignal(?d)

rule DistantSignalAfterBeacon: BasicSignals(?d) ^ Vorsignalbake(?b) ^ topo:isDistantFrom(?d, ?b, 100)
    -> DistantSignal(?d)

rule SchalthausByShape: Geometry(?v) ^ hasHeight(?v, ?h) ^ swrlb:lessThan(?h, 1)
    ^ hasVerticalPlane(?v, true) ^ hasHorizontalPlane(?v, true)
    -> Schalthaus(?v)

rule SchaltSchrankByShape: Geometry(?v) ^ hasHeight(?v, ?h) ^ swrlb:lessThan(?h, 0.5)
    ^ hasVerticalPlane(?v, true) ^ hasHorizontalPlane(?v, false)
    -> SchaltSchrank(?v)

rule VorsignalbakeByShape: Vertical_BoundingBox(?v) ^ hasHeight(?v, ?h) ^ swrlb:greaterThan(?h, 1.5)
    ^ swrlb:lessThanOrEqual(?h, 2.5) ^ verticalLineCount(?v, 1) ^ hasVerticalPlane(?v, true)
    -> Vorsignalbake(?v)

rule BreakpointTableByShape: Vertical_BoundingBox(?v) ^ hasHeight(?v, ?h) ^ swrlb:greaterThan(?h, 1)
    ^ swrlb:lessThanOrEqual(?h, 2) ^ verticalLineCount(?v, 2) ^ hasVerticalPlane(?v, true)
    -> Breakpoint_table(?v)

rule ChessBoardByShape: Vertical_BoundingBox(?v) ^ hasHeight(?v, ?h) ^ swrlb:greaterThan(?h, 1)
    ^ swrlb:lessThanOrEqual(?h, 1.5) ^ verticalLineCount(?v, 1) ^ hasVerticalPlane(?v, true)
    -> Chess_board(?v)

// Masts repeat along the track.
rule MastChain: Mast(?a) ^ Vertical_BoundingBox(?b) ^ topo:isDistantFrom(?a, ?b, 50)
    -> Mast(?b)
)";
}

} // namespace widop
