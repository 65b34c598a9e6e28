// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The widop Authors

#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace widop;
using widop::testing::Rng;
using widop::testing::pick;

namespace {

KnowledgeBase boxes(Rng& rng, std::size_t n) {
    auto kb = domain_kb();
    const std::vector<const char*> classes = {"BigMast", "MainSignal", "Schalthaus", "BasicSignals", "Mast"};
    for (std::size_t i = 0; i < n; ++i) {
        std::string id = "VerticalElementDetection_" + std::to_string(i + 1);
        kb.assert_class(id, "Vertical_BoundingBox");
        kb.attach_box(id, widop::testing::lattice_box(rng, 400, 40));
        if (widop::testing::coin(rng, 0.7)) kb.assert_class(id, classes[pick(rng, classes.size())]);
    }
    return kb;
}

std::size_t count_of(const std::string& s, const std::string& needle) {
    std::size_t n = 0;
    for (auto at = s.find(needle); at != std::string::npos; at = s.find(needle, at + 1)) ++n;
    return n;
}

} // namespace

TEST_CASE("exported scenes validate", "[vrml][property]") {
    Rng rng(51);
    for (int trial = 0; trial < 50; ++trial) {
        auto kb = boxes(rng, pick(rng, 12));
        auto doc = export_vrml(kb);
        CHECK(doc.rfind("#VRML V2.0 utf8\n", 0) == 0);
        CHECK(validate_vrml(doc).empty());
        CHECK(count_of(doc, "DEF ") == kb.boxed_individuals().size());
        CHECK(count_of(doc, "geometry Box { size ") == kb.boxed_individuals().size());
        CHECK(export_vrml(kb) == doc);
    }
}

TEST_CASE("colors follow the most specific class", "[vrml]") {
    auto kb = domain_kb();
    kb.assert_class("a", "Vertical_BoundingBox");
    kb.attach_box("a", Box3({0, 0, 0}, {1, 2, 3}));
    kb.assert_class("a", "Mast");
    kb.assert_class("a", "BigMast");
    kb.assert_class("b", "Vertical_BoundingBox");
    kb.attach_box("b", Box3({5, 0, 0}, {6, 1, 1}));
    ColorMap m;
    m.colors["Mast"] = {0.1, 0.2, 0.3};
    m.fallback = {1, 1, 1};
    auto doc = export_vrml(kb, m);
    CHECK(doc.find("# a BigMast\nDEF a Transform {\n  translation 0.5 1 1.5\n") != std::string::npos);
    CHECK(doc.find("diffuseColor 0.1 0.2 0.3") != std::string::npos);
    CHECK(doc.find("diffuseColor 1 1 1") != std::string::npos);
    CHECK(doc.find("size 1 2 3") != std::string::npos);
}

TEST_CASE("equally specific classes warn", "[vrml]") {
    auto kb = domain_kb();
    kb.assert_class("a", "Vertical_BoundingBox");
    kb.attach_box("a", Box3({0, 0, 0}, {1, 1, 1}));
    kb.assert_class("a", "NormalMast");
    kb.assert_class("a", "BigMast");
    std::vector<std::string> warnings;
    CHECK(most_specific_class(kb, "a", &warnings) == "BigMast");
    CHECK(warnings.size() == 1);
}

TEST_CASE("colormap files", "[vrml]") {
    auto m = parse_colormap("# c\ndefault = 0 0 0\nMast=1 0.5 0\n");
    CHECK(m.fallback == Rgb{0, 0, 0});
    CHECK(m.colors.at("Mast") == Rgb{1, 0.5, 0});
    CHECK(parse_colormap(format_colormap(default_colormap())).colors == default_colormap().colors);
    auto line_of = [](const std::string& text) -> std::size_t {
        try {
            parse_colormap(text);
        } catch (const ParseError& e) {
            return e.line();
        }
        return 0;
    };
    CHECK(line_of("Mast=1 0 0\nSignals=1 2 0\n") == 2);
    CHECK(line_of("Mast 1 0 0\n") == 1);
    CHECK(line_of("\nMast=1 0\n") == 2);
    CHECK(line_of("bad name=1 0 0\n") == 1);
}

TEST_CASE("validator diagnostics", "[vrml]") {
    const std::string ok = "#VRML V2.0 utf8\nShape { geometry Box { size 1 2 3 } }\n";
    CHECK(validate_vrml(ok).empty());
    CHECK_FALSE(validate_vrml("Shape { }\n").empty());
    CHECK(validate_vrml("#VRML V2.0 utf8\nShape {\n").front().line == 2);
    CHECK(validate_vrml("#VRML V2.0 utf8\n}\n").front().line == 2);
    CHECK_FALSE(validate_vrml("#VRML V2.0 utf8\nT { children [ } ]\n").empty());
    CHECK_FALSE(validate_vrml("#VRML V2.0 utf8\nB { size 1 2 }\n").empty());
    CHECK_FALSE(validate_vrml("#VRML V2.0 utf8\nB { size 1 -2 3 }\n").empty());
    CHECK_FALSE(validate_vrml("#VRML V2.0 utf8\nM { diffuseColor 1 2 0 }\n").empty());
    CHECK_FALSE(validate_vrml("#VRML V2.0 utf8\nT { rotation 0 1 0 }\n").empty());
    CHECK_FALSE(validate_vrml("#VRML V2.0 utf8\nT { translation 1 2 3x }\n").empty());
    CHECK_FALSE(validate_vrml("#VRML V2.0 utf8\nT { url \"open }\n").empty());
    CHECK(validate_vrml("#VRML V2.0 utf8\n# } [ stray in comment\nT { url \"} [\" }\n").empty());
}

TEST_CASE("dropping any bracket breaks validation", "[vrml][fuzz]") {
    Rng rng(53);
    auto doc = export_vrml(boxes(rng, 4));
    for (std::size_t i = 0; i < doc.size(); ++i) {
        char c = doc[i];
        if (c != '{' && c != '}' && c != '[' && c != ']') continue;
        std::string broken = doc;
        broken.erase(i, 1);
        CHECK_FALSE(validate_vrml(broken).empty());
    }
}

TEST_CASE("corrupting a numeric field breaks validation", "[vrml][fuzz]") {
    Rng rng(57);
    auto doc = export_vrml(boxes(rng, 3));
    for (const std::string field : {"translation ", "size ", "diffuseColor "}) {
        for (auto at = doc.find(field); at != std::string::npos; at = doc.find(field, at + 1)) {
            std::string broken = doc;
            broken.insert(at + field.size(), "q");
            CHECK_FALSE(validate_vrml(broken).empty());
        }
    }
}

TEST_CASE("random edits never crash the validator", "[vrml][fuzz]") {
    Rng rng(59);
    auto doc = export_vrml(boxes(rng, 3));
    const std::string alphabet = "{}[]\"#\n -.e0x";
    for (int i = 0; i < 2000; ++i) {
        std::string s = doc;
        for (std::size_t k = 0, n = 1 + pick(rng, 6); k < n && !s.empty(); ++k) {
            std::size_t at = pick(rng, s.size());
            if (widop::testing::coin(rng)) s.erase(at, 1 + pick(rng, 4));
            else s.insert(at, 1, alphabet[pick(rng, alphabet.size())]);
        }
        for (const auto& d : validate_vrml(s)) CHECK(d.line >= 1);
    }
}
