// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The widop Authors

#pragma once

// Command-line front end. Needs CLI11 (CLI11.hpp) on the include path.

#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "widop/domain.hpp"
#include "widop/evaluation.hpp"
#include "widop/kb_io.hpp"
#include "widop/pipeline.hpp"
#include "widop/planner.hpp"
#include "widop/settings.hpp"
#include "widop/synthscene.hpp"
#include "widop/vrml.hpp"

namespace widop::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kInput = 2, kPipeline = 3 };

inline constexpr const char* kConfigEnv = "WIDOP_CONFIG";

struct Failure {
    int code;
    std::string message;
};

/// Runs `f`, turning library errors into a failure with exit code `code`.
template <typename F>
auto stage(int code, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        throw Failure{code, e.what()};
    }
}

namespace detail {

inline std::vector<std::string> detector_settings() {
    return {"seed", "grid-cell", "vertical-threshold", "segmentation-radius", "ransac-iters", "inlier-dist",
            "min-inliers", "vertical-tolerance", "min-elevated-points", "slab-min-height", "min-horizontal-extent",
            "outlier-radius", "outlier-min-neighbors", "min-plane-width", "min-plane-elevation", "feature-clearance"};
}

inline std::vector<std::string> topo_settings() {
    return {"touch-epsilon", "distance-tolerance", "overlap-epsilon", "horizontal-distance"};
}

inline std::vector<std::string> engine_settings() { return {"max-iterations", "trace"}; }

inline std::vector<std::string> eval_settings() { return {"match-dist", "ancestor-levels"}; }

inline std::vector<std::string> join(std::initializer_list<std::vector<std::string>> parts) {
    std::vector<std::string> out;
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

inline bool is_switch(const std::string& name) { return name == "trace" || name == "horizontal-distance"; }

inline void emit(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty()) {
        out << content;
    } else {
        stage(kInput, [&] { text::write_file(path, content); });
    }
}

inline void require(const std::string& value, const char* flag) {
    if (value.empty()) throw Failure{kUsage, std::string(flag) + " is required"};
}

} // namespace detail

/// Parses `args` (without the program name), runs one subcommand and returns its exit code.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Knowledge-driven detection and annotation of railway objects in point clouds", "widop"};
    app.require_subcommand(1, 1);
    app.fallthrough(false);

    std::map<std::string, std::string> values;
    std::map<std::string, bool> switches;
    std::string config_path;
    std::map<CLI::App*, std::vector<std::string>> accepted;

    auto with_settings = [&](CLI::App* sub, std::vector<std::string> names) {
        sub->add_option("--config", config_path, "settings file (default: $" + std::string(kConfigEnv) + ")");
        for (const auto& n : names) {
            const Setting* s = find_setting(n);
            if (detail::is_switch(n)) {
                sub->add_flag("--" + n, switches[n], s->help);
            } else {
                sub->add_option("--" + n, values[n], s->help);
            }
        }
        accepted[sub] = std::move(names);
        return sub;
    };

    auto* gen = app.add_subcommand("generate", "synthesize a railway scene and its ground truth");
    std::string spec_path, out_cloud, gen_truth;
    std::optional<std::uint64_t> gen_seed;
    gen->add_option("--spec", spec_path, "scene spec (key = value)");
    gen->add_option("--seed", gen_seed, "overrides the spec's seed");
    gen->add_option("--out-cloud", out_cloud, "point cloud to write")->required();
    gen->add_option("--truth", gen_truth, "ground truth to write");

    auto* detect = with_settings(app.add_subcommand("detect", "detect geometry in a point cloud"),
                                 detail::join({{"cloud", "kb", "out-kb"}, detail::detector_settings()}));
    auto* qualify = with_settings(app.add_subcommand("qualify", "assert topological relations between boxes"),
                                  detail::join({{"kb", "out-kb"}, detail::topo_settings()}));
    auto* annotate = with_settings(app.add_subcommand("annotate", "run the annotation rules to a fixpoint"),
                                   detail::join({{"kb", "rules", "out-kb"}, detail::detector_settings(),
                                                 detail::topo_settings(), detail::engine_settings()}));
    auto* plan = with_settings(app.add_subcommand("plan", "print the processing plan for a concept"), {"kb"});
    std::string plan_concept;
    plan->add_option("concept", plan_concept, "domain concept")->required();
    auto* vrml = with_settings(app.add_subcommand("export-vrml", "write the annotated boxes as a VRML scene"),
                               {"kb", "colormap", "out-vrml"});
    auto* evaluate = with_settings(app.add_subcommand("evaluate", "score annotations against a ground truth"),
                                   detail::join({{"kb", "truth", "report"}, detail::eval_settings()}));
    std::vector<std::string> all_names;
    for (const auto& s : settings()) all_names.push_back(s.name);
    auto* run = with_settings(app.add_subcommand("run", "detect, qualify, annotate, export and evaluate"), all_names);
    auto* domain = app.add_subcommand("domain", "write the built-in domain pack and rules");
    std::string out_domain_kb, out_domain_rules;
    domain->add_option("--out-kb", out_domain_kb, "knowledge base file to write");
    domain->add_option("--out-rules", out_domain_rules, "rule file to write");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kUsage;
    }

    CLI::App* sub = app.get_subcommands().front();

    auto configure = [&]() {
        PipelineConfig cfg;
        std::string path = config_path;
        if (path.empty()) {
            if (const char* env = std::getenv(kConfigEnv)) path = env;
        }
        if (!path.empty()) {
            stage(kInput, [&] { apply_settings_text(cfg, text::read_file(path)); });
        }
        for (const auto& n : accepted[sub]) {
            if (sub->count("--" + n) == 0) continue;
            const std::string v = detail::is_switch(n) ? (switches[n] ? "true" : "false") : values[n];
            stage(kUsage, [&] { apply_setting(cfg, n, v); });
        }
        stage(kUsage, [&] { cfg.validate(); });
        return cfg;
    };

    try {
        if (sub == gen) {
            SceneSpec spec = stage(kInput, [&] { return spec_path.empty() ? SceneSpec{} : load_scene_spec(spec_path); });
            if (gen_seed) spec.seed = *gen_seed;
            Scene scene = stage(kPipeline, [&] { return generate_scene(spec); });
            stage(kInput, [&] {
                save_cloud(scene.cloud, out_cloud);
                if (!gen_truth.empty()) save_truth(scene.truth, gen_truth);
            });
            err << "generated " << scene.cloud.size() << " points, " << scene.truth.size() << " objects\n";
            return kOk;
        }
        if (sub == domain) {
            if (out_domain_kb.empty() && out_domain_rules.empty()) {
                out << domain_pack_text();
                return kOk;
            }
            if (!out_domain_kb.empty()) detail::emit(out_domain_kb, domain_pack_text(), out);
            if (!out_domain_rules.empty()) detail::emit(out_domain_rules, default_rules(), out);
            return kOk;
        }

        PipelineConfig cfg = configure();

        if (sub == detect) {
            detail::require(cfg.cloud_path, "--cloud");
            auto kb = stage(kInput, [&] { return load_domain_or(cfg.kb_path); });
            auto cloud = stage(kInput, [&] { return load_cloud(cfg.cloud_path); });
            auto n = stage(kPipeline, [&] { return run_detection(kb, cloud, cfg.cloud_path, cfg); });
            detail::emit(cfg.out_kb, serialize(kb), out);
            err << "detected " << n << " geometry individuals\n";
        } else if (sub == qualify) {
            detail::require(cfg.kb_path, "--kb");
            auto kb = stage(kInput, [&] { return load_kb(cfg.kb_path); });
            auto n = stage(kPipeline, [&] { return run_qualification(kb, cfg); });
            detail::emit(cfg.out_kb, serialize(kb), out);
            err << "asserted " << n << " relations\n";
        } else if (sub == annotate) {
            detail::require(cfg.kb_path, "--kb");
            auto kb = stage(kInput, [&] { return load_kb(cfg.kb_path); });
            auto rules = stage(kInput, [&] { return load_rules_or(cfg.rules_path); });
            auto report = stage(kPipeline, [&] { return run_annotation(kb, rules, cfg); });
            for (const auto& line : report.trace) err << line << "\n";
            detail::emit(cfg.out_kb, serialize(kb), out);
            err << "fixpoint after " << report.iterations << " iterations, " << report.assertions_added
                << " assertions added\n";
        } else if (sub == plan) {
            auto kb = stage(kInput, [&] { return load_domain_or(cfg.kb_path); });
            stage(kInput, [&] {
                if (!kb.has_concept(plan_concept)) throw KbError("unknown concept '" + plan_concept + "'");
            });
            auto text = stage(kPipeline, [&] { return format_plan(plan_concept, plan_for(kb, plan_concept)); });
            out << text;
        } else if (sub == vrml) {
            detail::require(cfg.kb_path, "--kb");
            auto kb = stage(kInput, [&] { return load_kb(cfg.kb_path); });
            auto colors = stage(kInput, [&] { return load_colormap_or(cfg.colormap_path); });
            std::vector<std::string> warnings;
            auto text = stage(kPipeline, [&] { return export_vrml(kb, colors, &warnings); });
            for (const auto& w : warnings) err << "warning: " << w << "\n";
            detail::emit(cfg.out_vrml, text, out);
        } else if (sub == evaluate) {
            detail::require(cfg.kb_path, "--kb");
            detail::require(cfg.truth_path, "--truth");
            auto kb = stage(kInput, [&] { return load_kb(cfg.kb_path); });
            auto truth = stage(kInput, [&] { return load_truth(cfg.truth_path); });
            auto text = stage(kPipeline, [&] { return format_report(evaluate_kb(kb, truth, cfg.eval)); });
            detail::emit(cfg.report_path, text, out);
        } else if (sub == run) {
            detail::require(cfg.cloud_path, "--cloud");
            auto cloud = stage(kInput, [&] { return load_cloud(cfg.cloud_path); });
            auto kb = stage(kInput, [&] { return load_domain_or(cfg.kb_path); });
            auto rules = stage(kInput, [&] { return load_rules_or(cfg.rules_path); });
            auto colors = stage(kInput, [&] { return load_colormap_or(cfg.colormap_path); });
            std::optional<GroundTruth> truth;
            if (!cfg.truth_path.empty()) truth = stage(kInput, [&] { return load_truth(cfg.truth_path); });
            auto result = stage(kPipeline, [&] {
                return run_scene(std::move(kb), rules, cloud, cfg.cloud_path, cfg, truth ? &*truth : nullptr, colors);
            });
            for (const auto& line : result.engine.trace) err << line << "\n";
            for (const auto& w : result.warnings) err << "warning: " << w << "\n";
            if (!cfg.out_kb.empty()) detail::emit(cfg.out_kb, serialize(result.kb), out);
            if (!cfg.out_vrml.empty()) detail::emit(cfg.out_vrml, result.vrml, out);
            detail::emit(cfg.report_path, result.report, out);
        }
        return kOk;
    } catch (const Failure& f) {
        err << "error: " << f.message << "\n";
        if (f.code == kUsage) err << "\n" << sub->help();
        return f.code;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kPipeline;
    }
}

} // namespace widop::cli
