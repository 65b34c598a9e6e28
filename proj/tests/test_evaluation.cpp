// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The widop Authors

#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace widop;
using widop::testing::Rng;
using widop::testing::pick;
using widop::testing::uniform;

namespace {

Box3 cube_at(double x, double y) { return Box3({x - 0.5, y - 0.5, 0}, {x + 0.5, y + 0.5, 1}); }

const std::vector<std::string> kLeaves = {"BigMast",       "NormalMast", "MainSignal",   "DistantSignal",
                                          "Vorsignalbake", "Schalthaus", "SchaltSchrank"};

/// Parent links of the classes used below, written out by hand.
const std::map<std::string, std::string> kParent = {
    {"BigMast", "Mast"},         {"NormalMast", "Mast"},       {"Mast", "DomainConcept"},
    {"MainSignal", "BasicSignals"}, {"DistantSignal", "BasicSignals"}, {"BasicSignals", "Signals"},
    {"Vorsignalbake", "SecondarySignal"}, {"SecondarySignal", "Signals"}, {"Signals", "DomainConcept"},
    {"Schalthaus", "Schaltanlage"}, {"SchaltSchrank", "Schaltanlage"}, {"Schaltanlage", "DomainConcept"},
};

bool compatible(const std::string& annotated, const std::string& truth, std::size_t levels) {
    std::string cur = truth;
    for (std::size_t i = 0; i <= levels; ++i) {
        if (cur == annotated) return true;
        auto it = kParent.find(cur);
        if (it == kParent.end()) return false;
        cur = it->second;
    }
    return false;
}

std::string label(Rng& rng) {
    std::string c = kLeaves[pick(rng, kLeaves.size())];
    for (int up = static_cast<int>(pick(rng, 4)); up > 0 && kParent.count(c); --up) c = kParent.at(c);
    return c;
}

} // namespace

TEST_CASE("separated scenes score like the per-truth nearest oracle", "[evaluation][property]") {
    Rng rng(41);
    const auto kb = domain_kb();
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t levels = pick(rng, 3);
        GroundTruth truth;
        std::vector<Annotation> ann;
        const std::size_t nt = pick(rng, 8);
        for (std::size_t j = 0; j < nt; ++j) {
            const double x = 10.0 * static_cast<double>(j);
            truth.push_back({"t" + std::to_string(j), kLeaves[pick(rng, kLeaves.size())], cube_at(x, 0), {x, 0, 0}});
            const std::size_t near = pick(rng, 3);
            for (std::size_t k = 0; k < near; ++k) {
                ann.push_back({"a" + std::to_string(ann.size()), label(rng), cube_at(x + uniform(rng, -0.6, 0.6), uniform(rng, -0.6, 0.6))});
            }
        }
        const std::size_t stray = pick(rng, 3);
        for (std::size_t k = 0; k < stray; ++k) ann.push_back({"a" + std::to_string(ann.size()), label(rng), cube_at(5.0 + 10.0 * static_cast<double>(k), 5)});

        // Oracle: each truth takes its nearest annotation within 1 m (ties by id); the
        // layout keeps every annotation within reach of at most one truth.
        std::size_t tp = 0;
        std::map<std::string, std::size_t> truth_tp;
        for (const auto& t : truth) {
            const Annotation* best = nullptr;
            double best_d = 0;
            for (const auto& a : ann) {
                double d = distance(a.box.centroid(), t.box.centroid());
                if (d > 1.0) continue;
                if (!best || d < best_d || (d == best_d && a.id < best->id)) {
                    best = &a;
                    best_d = d;
                }
            }
            if (best && compatible(best->class_name, t.class_name, levels)) {
                ++tp;
                ++truth_tp[t.class_name];
            }
        }
        EvalConfig cfg;
        cfg.ancestor_levels = levels;
        auto r = evaluate_annotations(ann, truth, &kb, cfg);
        CHECK(r.total.tp == tp);
        CHECK(r.total.annotated == ann.size());
        CHECK(r.total.truth == truth.size());
        std::size_t sum_tp = 0;
        for (const auto& row : r.classes) {
            CHECK(row.tp + row.fn == row.truth);
            CHECK(row.tp + row.fp == row.annotated);
            sum_tp += row.tp;
            auto it = truth_tp.find(row.name);
            CHECK(row.tp == (it == truth_tp.end() ? 0 : it->second));
        }
        CHECK(sum_tp == tp);
        std::size_t cat_truth = 0;
        for (const auto& c : r.categories) cat_truth += c.truth;
        CHECK(cat_truth == truth.size());
    }
}

TEST_CASE("greedy matching is one-to-one and by distance", "[evaluation][property]") {
    Rng rng(43);
    for (int trial = 0; trial < 200; ++trial) {
        GroundTruth truth;
        std::vector<Annotation> ann;
        for (std::size_t j = 0, n = pick(rng, 6); j < n; ++j) {
            truth.push_back({"t" + std::to_string(j), "X", cube_at(uniform(rng, 0, 3), uniform(rng, 0, 3)), {}});
        }
        for (std::size_t i = 0, n = pick(rng, 6); i < n; ++i) {
            ann.push_back({"a" + std::to_string(i), "X", cube_at(uniform(rng, 0, 3), uniform(rng, 0, 3))});
        }
        auto r = evaluate_annotations(ann, truth, nullptr);
        std::set<std::string> as, ts;
        for (const auto& m : r.matches) {
            CHECK(as.insert(m.annotation).second);
            CHECK(ts.insert(m.truth).second);
            CHECK(m.distance <= 1.0);
        }
        // No pair left unmatched on both sides lies within reach.
        for (const auto& a : ann) {
            for (const auto& t : truth) {
                if (!as.count(a.id) && !ts.count(t.id)) CHECK(distance(a.box.centroid(), t.box.centroid()) > 1.0);
            }
        }
        for (std::size_t k = 1; k < r.matches.size(); ++k) CHECK(r.matches[k - 1].distance <= r.matches[k].distance);
    }
}

TEST_CASE("ancestor levels widen what counts", "[evaluation]") {
    const auto kb = domain_kb();
    CHECK(class_compatible(&kb, "MainSignal", "MainSignal", 0));
    CHECK_FALSE(class_compatible(&kb, "BasicSignals", "MainSignal", 0));
    CHECK(class_compatible(&kb, "BasicSignals", "MainSignal", 1));
    CHECK_FALSE(class_compatible(&kb, "Signals", "MainSignal", 1));
    CHECK(class_compatible(&kb, "Signals", "MainSignal", 2));
    CHECK_FALSE(class_compatible(&kb, "MainSignal", "BasicSignals", 5));
    CHECK_FALSE(class_compatible(nullptr, "BasicSignals", "MainSignal", 3));
}

TEST_CASE("conflicting classes fall back to their common ancestor", "[evaluation]") {
    auto kb = domain_kb();
    kb.assert_class("g", "Vertical_BoundingBox");
    kb.assert_class("g", "BigMast");
    kb.assert_class("g", "Mast");
    CHECK(evaluation_class(kb, "g") == "BigMast");
    kb.assert_class("g", "NormalMast");
    CHECK(evaluation_class(kb, "g") == "Mast");
    kb.assert_class("g", "MainSignal");
    CHECK(evaluation_class(kb, "g") == "DomainConcept");
    kb.assert_class("h", "Vertical_BoundingBox");
    CHECK_FALSE(evaluation_class(kb, "h").has_value());
    CHECK(lowest_common_ancestor(kb, {"MainSignal", "Vorsignalbake"}) == "Signals");
    CHECK(lowest_common_ancestor(kb, {"MainSignal", "Scene"}) == std::nullopt);
}

TEST_CASE("evaluate_kb counts boxes and annotations", "[evaluation]") {
    auto kb = domain_kb();
    kb.assert_class("v1", "Vertical_BoundingBox");
    kb.attach_box("v1", cube_at(0, 0));
    kb.assert_class("v1", "BigMast");
    kb.assert_class("v2", "Vertical_BoundingBox");
    kb.attach_box("v2", cube_at(20, 0));
    GroundTruth truth = {{"t1", "BigMast", cube_at(0.3, 0), {}}, {"t2", "Schalthaus", cube_at(40, 0), {}}};
    auto r = evaluate_kb(kb, truth);
    CHECK(r.detected_boxes == 2);
    CHECK(r.total.annotated == 1);
    CHECK(r.total.tp == 1);
    CHECK(r.total.fn == 1);
    CHECK(r.total.precision() == 1.0);
    CHECK(r.total.recall() == 0.5);
    auto text = format_report(r);
    CHECK(text.find("detected_boxes=2") != std::string::npos);
    CHECK(text.find("detected boxes: 2") != std::string::npos);
    EvalConfig bad;
    bad.match_distance = 0;
    CHECK_THROWS_AS(evaluate_kb(kb, truth, bad), Error);
}
