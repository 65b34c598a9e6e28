// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The widop Authors

#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "widop/error.hpp"
#include "widop/geometry.hpp"
#include "widop/kb.hpp"
#include "widop/synthscene.hpp"
#include "widop/text.hpp"

namespace widop {

inline constexpr const char* kDomainRoot = "DomainConcept";

struct Annotation {
    std::string id;
    std::string class_name;
    Box3 box;
};

struct EvalConfig {
    double match_distance = 1.0;
    /// How many ancestors of the truth class an annotation may name and still count (0 = exact).
    std::size_t ancestor_levels = 1;

    void validate() const {
        if (!(match_distance > 0.0)) throw Error("match distance must be positive");
    }
};

struct ClassRow {
    std::string name;
    std::size_t annotated = 0;
    std::size_t truth = 0;
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    double precision() const { return annotated == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(annotated); }
    double recall() const { return truth == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(truth); }
};

struct MatchPair {
    std::string annotation;
    std::string truth;
    double distance = 0.0;
    bool correct = false;
};

/// Correct annotations are booked under their truth's class, so every row satisfies
/// tp + fn = truth and tp + fp = annotated.
struct EvalReport {
    std::vector<ClassRow> classes;    // by class name
    std::vector<ClassRow> categories; // grouped under the top-level domain concepts
    ClassRow total{"total"};
    std::size_t detected_boxes = 0;
    std::vector<MatchPair> matches;
};

// ---- class selection ------------------------------------------------------------------

/// Lowest concept subsuming all of `classes`, or nullopt when they share no root.
inline std::optional<std::string> lowest_common_ancestor(const KnowledgeBase& kb, const std::vector<std::string>& classes) {
    if (classes.empty()) return std::nullopt;
    for (const auto& candidate : kb.ancestors(classes.front())) {
        bool all = std::all_of(classes.begin(), classes.end(),
                               [&](const std::string& c) { return kb.is_subconcept(c, candidate); });
        if (all) return candidate;
    }
    return std::nullopt;
}

/// Asserted classes of `id` under `root`.
inline std::vector<std::string> classes_under(const KnowledgeBase& kb, const std::string& id, const std::string& root) {
    std::vector<std::string> out;
    if (!kb.has_concept(root)) return out;
    for (const auto& c : kb.classes_of(id)) {
        if (kb.is_subconcept(c, root)) out.push_back(c);
    }
    return out;
}

/// Single label for evaluation: the deepest asserted class when it refines all the others,
/// otherwise their lowest common ancestor (conflicting evidence keeps the general class).
inline std::optional<std::string> evaluation_class(const KnowledgeBase& kb, const std::string& id,
                                                   const std::string& root = kDomainRoot) {
    auto cls = classes_under(kb, id, root);
    if (cls.empty()) return std::nullopt;
    auto deepest = *std::max_element(cls.begin(), cls.end(), [&](const auto& a, const auto& b) {
        return std::make_pair(kb.depth(a), b) < std::make_pair(kb.depth(b), a);
    });
    bool refines_all = std::all_of(cls.begin(), cls.end(), [&](const auto& c) { return kb.is_subconcept(deepest, c); });
    if (refines_all) return deepest;
    return lowest_common_ancestor(kb, cls);
}

/// Boxed individuals carrying at least one domain class, in id order.
inline std::vector<Annotation> collect_annotations(const KnowledgeBase& kb) {
    std::vector<Annotation> out;
    for (const auto& id : kb.boxed_individuals()) {
        if (auto c = evaluation_class(kb, id)) out.push_back({id, *c, *kb.geometry(id)->box});
    }
    return out;
}

// ---- matching -----------------------------------------------------------------------

/// `annotated` names `truth` itself or one of its first `levels` ancestors.
inline bool class_compatible(const KnowledgeBase* kb, const std::string& annotated, const std::string& truth,
                             std::size_t levels) {
    if (annotated == truth) return true;
    if (!kb || levels == 0 || !kb->has_concept(truth)) return false;
    auto chain = kb->ancestors(truth);
    for (std::size_t i = 1; i < chain.size() && i <= levels; ++i) {
        if (chain[i] == annotated) return true;
    }
    return false;
}

/// Top-level domain concept above `cls` (the class itself when unknown).
inline std::string category_of(const KnowledgeBase* kb, const std::string& cls) {
    if (!kb || !kb->has_concept(cls)) return cls;
    auto chain = kb->ancestors(cls);
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        if (chain[i + 1] == kDomainRoot) return chain[i];
    }
    return chain.back();
}

/// Greedy one-to-one matching by ascending centroid distance (ties by ids); a pair within
/// the match distance is correct when the classes are compatible. `kb` supplies the concept
/// tree and may be null (exact class equality only).
inline EvalReport evaluate_annotations(const std::vector<Annotation>& annotations, const GroundTruth& truth,
                                       const KnowledgeBase* kb, const EvalConfig& cfg = {}) {
    cfg.validate();
    std::vector<std::tuple<double, std::string, std::string, std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < annotations.size(); ++i) {
        for (std::size_t j = 0; j < truth.size(); ++j) {
            double d = distance(annotations[i].box.centroid(), truth[j].box.centroid());
            if (d <= cfg.match_distance) pairs.emplace_back(d, annotations[i].id, truth[j].id, i, j);
        }
    }
    std::sort(pairs.begin(), pairs.end());

    EvalReport report;
    std::vector<bool> a_used(annotations.size()), t_used(truth.size());
    std::vector<std::optional<std::size_t>> a_match(annotations.size());
    for (const auto& [d, aid, tid, i, j] : pairs) {
        if (a_used[i] || t_used[j]) continue;
        a_used[i] = t_used[j] = true;
        bool ok = class_compatible(kb, annotations[i].class_name, truth[j].class_name, cfg.ancestor_levels);
        if (ok) a_match[i] = j;
        report.matches.push_back({aid, tid, d, ok});
    }

    std::map<std::string, ClassRow> rows;
    auto row = [&](const std::string& name) -> ClassRow& {
        auto& r = rows[name];
        r.name = name;
        return r;
    };
    std::vector<bool> t_found(truth.size());
    for (std::size_t i = 0; i < annotations.size(); ++i) {
        if (a_match[i]) {
            auto& r = row(truth[*a_match[i]].class_name);
            ++r.annotated;
            ++r.tp;
            t_found[*a_match[i]] = true;
        } else {
            auto& r = row(annotations[i].class_name);
            ++r.annotated;
            ++r.fp;
        }
    }
    for (std::size_t j = 0; j < truth.size(); ++j) {
        auto& r = row(truth[j].class_name);
        ++r.truth;
        if (!t_found[j]) ++r.fn;
    }

    std::map<std::string, ClassRow> cats;
    for (const auto& [name, r] : rows) {
        report.classes.push_back(r);
        auto& c = cats[category_of(kb, name)];
        c.name = category_of(kb, name);
        c.annotated += r.annotated;
        c.truth += r.truth;
        c.tp += r.tp;
        c.fp += r.fp;
        c.fn += r.fn;
        report.total.annotated += r.annotated;
        report.total.truth += r.truth;
        report.total.tp += r.tp;
        report.total.fp += r.fp;
        report.total.fn += r.fn;
    }
    for (const auto& [name, c] : cats) report.categories.push_back(c);
    return report;
}

/// Scores the annotated boxes of `kb` against `truth`, using `kb`'s concept tree.
inline EvalReport evaluate_kb(const KnowledgeBase& kb, const GroundTruth& truth, const EvalConfig& cfg = {}) {
    auto report = evaluate_annotations(collect_annotations(kb), truth, &kb, cfg);
    report.detected_boxes = kb.boxed_individuals().size();
    return report;
}

// ---- output ---------------------------------------------------------------------------

namespace detail {

inline std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

inline std::string pad_right(std::string s, std::size_t w) {
    if (s.size() < w) s.append(w - s.size(), ' ');
    return s;
}

inline std::string pad_left(std::string s, std::size_t w) {
    if (s.size() < w) s.insert(0, w - s.size(), ' ');
    return s;
}

} // namespace detail

/// Aligned table: one row per class, then per category, then the total.
inline std::string format_report_table(const EvalReport& r) {
    std::size_t w = 8;
    for (const auto& row : r.classes) w = std::max(w, row.name.size());
    for (const auto& row : r.categories) w = std::max(w, row.name.size());
    auto line = [&](const ClassRow& row) {
        return detail::pad_right(row.name, w) + detail::pad_left(std::to_string(row.annotated), 10) +
               detail::pad_left(std::to_string(row.truth), 7) + detail::pad_left(std::to_string(row.tp), 5) +
               detail::pad_left(std::to_string(row.fp), 5) + detail::pad_left(std::to_string(row.fn), 5) +
               detail::pad_left(detail::fixed(row.precision(), 3), 11) +
               detail::pad_left(detail::fixed(row.recall(), 3), 8) + "\n";
    };
    std::string head = detail::pad_right("class", w) + detail::pad_left("annotated", 10) + detail::pad_left("truth", 7) +
                       detail::pad_left("TP", 5) + detail::pad_left("FP", 5) + detail::pad_left("FN", 5) +
                       detail::pad_left("precision", 11) + detail::pad_left("recall", 8) + "\n";
    std::string rule(head.size() - 1, '-');
    std::string out = "detected boxes: " + std::to_string(r.detected_boxes) + "\n" + head + rule + "\n";
    for (const auto& row : r.classes) out += line(row);
    out += rule + "\n";
    for (const auto& row : r.categories) out += line(row);
    out += rule + "\n" + line(r.total);
    return out;
}

/// `key=value` lines: `detected_boxes=`, `class.<name>.<field>=`, `category.<name>.<field>=`, `total.<field>=`.
inline std::string format_report_kv(const EvalReport& r) {
    std::string out = "detected_boxes=" + std::to_string(r.detected_boxes) + "\n";
    auto emit = [&](const std::string& prefix, const ClassRow& row) {
        out += prefix + ".annotated=" + std::to_string(row.annotated) + "\n";
        out += prefix + ".truth=" + std::to_string(row.truth) + "\n";
        out += prefix + ".tp=" + std::to_string(row.tp) + "\n";
        out += prefix + ".fp=" + std::to_string(row.fp) + "\n";
        out += prefix + ".fn=" + std::to_string(row.fn) + "\n";
        out += prefix + ".precision=" + detail::fixed(row.precision(), 6) + "\n";
        out += prefix + ".recall=" + detail::fixed(row.recall(), 6) + "\n";
    };
    for (const auto& row : r.classes) emit("class." + row.name, row);
    for (const auto& row : r.categories) emit("category." + row.name, row);
    emit("total", r.total);
    return out;
}

inline std::string format_report(const EvalReport& r) { return format_report_table(r) + "\n" + format_report_kv(r); }

} // namespace widop
