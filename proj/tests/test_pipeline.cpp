// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The widop Authors

#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace widop;

namespace {

SceneSpec short_track(std::uint64_t seed, double sigma) {
    SceneSpec s;
    s.track_length = 160;
    s.masts = 3;
    s.signals = 1;
    s.schaltanlagen = 2;
    s.schaltanlage_offset = 40;
    s.schaltanlage_spacing = 80;
    s.noise_sigma = sigma;
    s.clutter_fraction = sigma > 0 ? 0.05 : 0.0;
    s.seed = seed;
    return s;
}

PipelineResult run_on(const Scene& scene, const PipelineConfig& cfg, const std::vector<Rule>& rules) {
    return run_scene(domain_kb(), rules, scene.cloud, "scene.xyz", cfg, &scene.truth);
}

} // namespace

TEST_CASE("noiseless short track is annotated perfectly", "[pipeline]") {
    auto scene = generate_scene(short_track(3, 0.0));
    auto r = run_on(scene, PipelineConfig{}, parse_rules(default_rules()));
    REQUIRE(r.evaluation);
    CHECK(r.evaluation->total.precision() == 1.0);
    CHECK(r.evaluation->total.recall() == 1.0);
    CHECK(r.detected == scene.truth.size());
    CHECK(validate_vrml(r.vrml).empty());
    CHECK(r.report.find("geometry_individuals=" + std::to_string(r.detected)) == 0);
}

TEST_CASE("reruns are byte-identical", "[pipeline][property]") {
    auto scene = generate_scene(short_track(5, 0.02));
    auto rules = parse_rules(default_rules());
    PipelineConfig cfg;
    cfg.set_seed(11);
    auto a = run_on(scene, cfg, rules);
    auto b = run_on(scene, cfg, rules);
    CHECK(serialize(a.kb) == serialize(b.kb));
    CHECK(a.vrml == b.vrml);
    CHECK(a.report == b.report);
    CHECK(deserialize(serialize(a.kb)) == a.kb);
}

TEST_CASE("a rule subset derives a subset", "[pipeline][property]") {
    auto scene = generate_scene(short_track(7, 0.0));
    auto all = parse_rules(default_rules());
    auto full = run_on(scene, PipelineConfig{}, all);
    widop::testing::Rng rng(7);
    for (int trial = 0; trial < 6; ++trial) {
        std::vector<Rule> some;
        for (const auto& r : all) {
            if (widop::testing::coin(rng)) some.push_back(r);
        }
        auto part = run_on(scene, PipelineConfig{}, some);
        for (const auto& a : part.kb.assertions()) CHECK(full.kb.contains(a));
    }
}

TEST_CASE("stages are idempotent", "[pipeline]") {
    auto scene = generate_scene(short_track(9, 0.0));
    PipelineConfig cfg;
    auto kb = domain_kb();
    auto made = run_detection(kb, scene.cloud, "s.xyz", cfg);
    CHECK(made > 0);
    CHECK(run_detection(kb, scene.cloud, "s.xyz", cfg) == 0);
    run_qualification(kb, cfg);
    CHECK(run_qualification(kb, cfg) == 0);
    auto rules = parse_rules(default_rules());
    run_annotation(kb, rules, cfg);
    CHECK(run_annotation(kb, rules, cfg).assertions_added == 0);
}

TEST_CASE("run_all writes every configured output", "[pipeline]") {
    widop::testing::TempDir dir("pipeline");
    auto scene = generate_scene(short_track(1, 0.0));
    save_cloud(scene.cloud, dir.file("c.xyz"));
    text::write_file(dir.file("t.truth"), format_truth(scene.truth));
    PipelineConfig cfg;
    cfg.cloud_path = dir.file("c.xyz");
    cfg.truth_path = dir.file("t.truth");
    cfg.out_kb = dir.file("out.kb");
    cfg.out_vrml = dir.file("out.wrl");
    cfg.report_path = dir.file("report.txt");
    auto r = run_all(cfg);
    CHECK(text::read_file(cfg.out_kb) == serialize(r.kb));
    CHECK(text::read_file(cfg.out_vrml) == r.vrml);
    CHECK(text::read_file(cfg.report_path) == r.report);
    CHECK(r.report.find("precision") != std::string::npos);

    PipelineConfig missing;
    CHECK_THROWS_AS(run_all(missing), Error);
    missing.cloud_path = dir.file("none.xyz");
    CHECK_THROWS_AS(run_all(missing), IoError);
}

TEST_CASE("settings by name", "[pipeline][settings]") {
    PipelineConfig cfg;
    apply_settings_text(cfg, "# tuned\nseed = 9\ngrid-cell = 0.25\ntrace = true\nout-kb = a.kb\n");
    CHECK(cfg.detector.seed == 9);
    CHECK(cfg.engine.seed == 9);
    CHECK(cfg.detector.grid_cell == 0.25);
    CHECK(cfg.engine.trace);
    CHECK(cfg.out_kb == "a.kb");
    for (const auto& s : settings()) CHECK(find_setting(s.name) == &s);

    auto line_of = [](const std::string& text) -> std::size_t {
        PipelineConfig c;
        try {
            apply_settings_text(c, text);
        } catch (const ParseError& e) {
            return e.line();
        }
        return 0;
    };
    CHECK(line_of("seed = 1\nnope = 2\n") == 2);
    CHECK(line_of("\n\ngrid-cell = wide\n") == 3);
    CHECK(line_of("seed = -1\n") == 1);
    CHECK(line_of("trace = maybe\n") == 1);
    CHECK(line_of("seed 4\n") == 1);
    CHECK_THROWS_AS(parse_settings("a-b = 1\n"), ParseError);
    CHECK(parse_settings("seed=1\n# x\ntrace = on\n") ==
          std::vector<std::pair<std::string, std::string>>{{"seed", "1"}, {"trace", "on"}});
}

TEST_CASE("invalid configurations are rejected before running", "[pipeline][settings]") {
    PipelineConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    apply_setting(cfg, "max-iterations", "0");
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = {};
    apply_setting(cfg, "match-dist", "0");
    CHECK_THROWS_AS(cfg.validate(), Error);
    CHECK_THROWS_AS(apply_setting(cfg, "unknown", "1"), Error);
}
