// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The widop Authors

#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace widop;

TEST_CASE("shipped data files match the built-in pack", "[domain]") {
    CHECK(text::read_file(WIDOP_DATA_DIR "/db_domain.kb") == domain_pack_text());
    CHECK(text::read_file(WIDOP_DATA_DIR "/db_default.rules") == default_rules());
    auto spec = load_scene_spec(WIDOP_DATA_DIR "/default_scene.spec");
    CHECK(spec.masts == 10);
    CHECK(spec.signals == 5);
    CHECK(spec.schaltanlagen == 3);
}

TEST_CASE("concept tree of the pack", "[domain]") {
    auto kb = domain_kb();
    CHECK(kb.is_subconcept("BigMast", "Mast"));
    CHECK(kb.is_subconcept("MainSignal", "BasicSignals"));
    CHECK(kb.is_subconcept("Vorsignalbake", "Signals"));
    CHECK(kb.is_subconcept("SchaltSchrank", "Schaltanlage"));
    CHECK(kb.is_subconcept("Vertical_BoundingBox", "Geometry"));
    for (const char* leaf : {"BigMast", "NormalMast", "MainSignal", "DistantSignal", "Vorsignalbake", "Breakpoint_table",
                             "Chess_board", "Schalthaus", "SchaltSchrank"}) {
        CHECK(kb.is_subconcept(leaf, kDomainRoot));
        CHECK(kb.descendants(leaf).size() == 1);
    }
}

TEST_CASE("the pack refuses to load twice", "[domain]") {
    auto kb = domain_kb();
    CHECK_THROWS_AS(load_domain_pack(kb), KbError);
}

TEST_CASE("height bands are stored as data", "[domain]") {
    auto kb = domain_kb();
    CHECK(kb.data_value("Band_BigMast", "minHeight") == Literal::number(6));
    for (const auto& b : height_bands()) {
        auto id = "Band_" + b.concept_name;
        CHECK(kb.is_instance_of(id, "HeightBand"));
        if (b.max) CHECK(*b.max > b.min);
    }
}

TEST_CASE("default rules compile against the pack", "[domain]") {
    auto kb = domain_kb();
    PipelineConfig cfg;
    auto rules = parse_rules(default_rules());
    auto report = run_annotation(kb, rules, cfg);
    CHECK(report.assertions_added == 0);
    CHECK(report.iterations == 1);
}

TEST_CASE("height and shape rules on hand-made boxes", "[domain]") {
    auto kb = domain_kb();
    auto add = [&](const std::string& id, const char* cls, double x, double h, double lines, bool vplane, bool hplane) {
        kb.assert_class(id, cls);
        kb.attach_box(id, Box3({x - 0.3, -0.3, 0}, {x + 0.3, 0.3, h}));
        kb.assert_data(id, "hasHeight", Literal::number(h));
        kb.assert_data(id, "verticalLineCount", Literal::number(lines));
        kb.assert_data(id, "hasVerticalPlane", Literal::boolean(vplane));
        kb.assert_data(id, "hasHorizontalPlane", Literal::boolean(hplane));
    };
    add("big", "Vertical_BoundingBox", 0, 7.2, 2, false, false);
    add("normal", "Vertical_BoundingBox", 25, 5.5, 2, true, false);
    add("signal", "Vertical_BoundingBox", 60, 5.0, 1, false, false);
    add("house", "Horizontal_BoundingBox", 120, 0.7, 0, true, true);
    add("cabinet", "Horizontal_BoundingBox", 140, 0.4, 0, true, false);
    add("beacon", "Vertical_BoundingBox", 170, 2.0, 1, true, false);
    PipelineConfig cfg;
    run_annotation(kb, parse_rules(default_rules()), cfg);
    // The big-mast rule starts from the detector, so a box without a scene stays unlabeled.
    CHECK_FALSE(evaluation_class(kb, "big").has_value());
    CHECK(evaluation_class(kb, "normal") == "NormalMast");
    CHECK(evaluation_class(kb, "signal") == "BasicSignals");
    CHECK(evaluation_class(kb, "house") == "Schalthaus");
    CHECK(evaluation_class(kb, "cabinet") == "SchaltSchrank");
    CHECK(evaluation_class(kb, "beacon") == "Vorsignalbake");
}
