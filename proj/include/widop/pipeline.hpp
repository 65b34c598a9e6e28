// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The widop Authors

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "widop/domain.hpp"
#include "widop/engine.hpp"
#include "widop/evaluation.hpp"
#include "widop/kb.hpp"
#include "widop/kb_io.hpp"
#include "widop/pointcloud.hpp"
#include "widop/processing.hpp"
#include "widop/rules.hpp"
#include "widop/synthscene.hpp"
#include "widop/topology.hpp"
#include "widop/vrml.hpp"

namespace widop {

/// Empty paths select the built-in domain pack, the default rules and the default colors;
/// empty output paths are not written.
struct PipelineConfig {
    std::string cloud_path;
    std::string kb_path;
    std::string rules_path;
    std::string truth_path;
    std::string colormap_path;
    std::string out_kb;
    std::string out_vrml;
    std::string report_path;

    DetectorConfig detector;
    TopoConfig topo;
    EngineConfig engine;
    EvalConfig eval;

    /// One seed for every stochastic stage.
    void set_seed(std::uint64_t seed) {
        detector.seed = seed;
        engine.seed = seed;
    }

    void validate() const {
        detector.validate();
        topo.validate();
        eval.validate();
        if (engine.max_iterations == 0) throw Error("max-iterations must be positive");
    }
};

struct PipelineResult {
    KnowledgeBase kb;
    std::size_t detected = 0;
    std::size_t relations = 0;
    EvaluationReport engine;
    std::optional<EvalReport> evaluation;
    std::string vrml;
    std::string report;
    std::vector<std::string> warnings;
};

/// Runs both detectors over `cloud` for the scene of `path`. Returns the number of geometry
/// individuals created (0 when the scene was already processed).
inline std::size_t run_detection(KnowledgeBase& kb, const PointCloud& cloud, const std::string& path,
                                 const PipelineConfig& cfg) {
    const auto scene = ensure_scene(kb, path);
    return detect_into_kb(kb, scene, cloud, Orientation::Vertical, cfg.detector) +
           detect_into_kb(kb, scene, cloud, Orientation::Horizontal, cfg.detector);
}

inline std::size_t run_qualification(KnowledgeBase& kb, const PipelineConfig& cfg) { return qualify_all(kb, cfg.topo); }

inline RuleEngine make_engine(const PipelineConfig& cfg, std::shared_ptr<CloudCache> cache = std::make_shared<CloudCache>()) {
    RuleEngine engine;
    register_standard_builtins(engine);
    register_topology_builtins(engine, cfg.topo);
    register_processing_builtins(engine, cfg.detector, std::move(cache));
    return engine;
}

inline EvaluationReport run_annotation(KnowledgeBase& kb, const std::vector<Rule>& rules, const PipelineConfig& cfg,
                                       std::shared_ptr<CloudCache> cache = std::make_shared<CloudCache>()) {
    return make_engine(cfg, std::move(cache)).evaluate(kb, rules, cfg.engine);
}

/// Stage counters followed by the evaluation, when there is one.
inline std::string format_pipeline_report(const PipelineResult& r) {
    std::string out = "geometry_individuals=" + std::to_string(r.detected) + "\n";
    out += "relations=" + std::to_string(r.relations) + "\n";
    out += "iterations=" + std::to_string(r.engine.iterations) + "\n";
    out += "assertions_added=" + std::to_string(r.engine.assertions_added) + "\n";
    out += "annotated=" + std::to_string(collect_annotations(r.kb).size()) + "\n";
    for (const auto& [name, n] : r.engine.builtin_calls) out += "calls." + name + "=" + std::to_string(n) + "\n";
    if (r.evaluation) out += "\n" + format_report(*r.evaluation);
    return out;
}

/// Detection, qualification, annotation, export and (with a truth) evaluation over an
/// in-memory cloud. `kb` should already hold the domain pack.
inline PipelineResult run_scene(KnowledgeBase kb, const std::vector<Rule>& rules, const PointCloud& cloud,
                                const std::string& cloud_path, const PipelineConfig& cfg,
                                const GroundTruth* truth = nullptr, const ColorMap& colors = default_colormap()) {
    cfg.validate();
    PipelineResult r;
    auto cache = std::make_shared<CloudCache>();
    cache->put(cloud_path, cloud);
    r.detected = run_detection(kb, cloud, cloud_path, cfg);
    r.relations = run_qualification(kb, cfg);
    r.engine = run_annotation(kb, rules, cfg, cache);
    r.kb = std::move(kb);
    r.vrml = export_vrml(r.kb, colors, &r.warnings);
    if (truth) r.evaluation = evaluate_kb(r.kb, *truth, cfg.eval);
    r.report = format_pipeline_report(r);
    return r;
}

inline KnowledgeBase load_domain_or(const std::string& path) { return path.empty() ? domain_kb() : load_kb(path); }

inline std::vector<Rule> load_rules_or(const std::string& path) {
    return parse_rules(path.empty() ? default_rules() : text::read_file(path));
}

inline ColorMap load_colormap_or(const std::string& path) {
    return path.empty() ? default_colormap() : parse_colormap(text::read_file(path));
}

/// Loads every input named by `cfg`, runs the pipeline and writes the configured outputs.
inline PipelineResult run_all(const PipelineConfig& cfg) {
    if (cfg.cloud_path.empty()) throw Error("no point cloud given");
    const auto cloud = load_cloud(cfg.cloud_path);
    auto kb = load_domain_or(cfg.kb_path);
    const auto rules = load_rules_or(cfg.rules_path);
    const auto colors = load_colormap_or(cfg.colormap_path);
    std::optional<GroundTruth> truth;
    if (!cfg.truth_path.empty()) truth = load_truth(cfg.truth_path);

    auto r = run_scene(std::move(kb), rules, cloud, cfg.cloud_path, cfg, truth ? &*truth : nullptr, colors);
    if (!cfg.out_kb.empty()) save_kb(r.kb, cfg.out_kb);
    if (!cfg.out_vrml.empty()) text::write_file(cfg.out_vrml, r.vrml);
    if (!cfg.report_path.empty()) text::write_file(cfg.report_path, r.report);
    return r;
}

} // namespace widop
