// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The widop Authors

#pragma once

// Independent reference implementations and random instance generators shared by the
// unit tests and the acceptance binary. Nothing here calls into the code under test
// except to build inputs and to read results back.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "widop/widop.hpp"

namespace widop::testing {

using Rng = std::mt19937_64;

inline std::size_t pick(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }
inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

// ---- naive datalog -----------------------------------------------------------------

/// A ground fact: (kind, subject, predicate, object text). Class facts have an empty object.
using Fact = std::tuple<char, std::string, std::string, std::string>;

struct OAtom {
    char kind = 'c'; // 'c' class, 'o' object property, 'd' data property
    std::string pred;
    std::vector<std::string> args; // "?x" variables, otherwise constants in surface form
};

struct ORule {
    std::string name;
    std::vector<OAtom> body;
    std::vector<OAtom> head;
};

/// A built-in-free program over a small vocabulary, kept in its own representation.
struct Instance {
    std::map<std::string, std::string> parent; // concept -> parent ("" for roots)
    std::vector<std::string> object_props;
    std::vector<std::string> data_props;
    std::set<Fact> facts;
    std::vector<ORule> rules;
};

inline bool is_var(const std::string& s) { return !s.empty() && s[0] == '?'; }

/// Saturates by brute force: every rule is tried under every assignment of its variables
/// to the active domain, until nothing new appears.
inline std::set<Fact> naive_fixpoint(const Instance& in) {
    std::set<Fact> facts = in.facts;
    auto holds_class = [&](const std::string& who, const std::string& c) {
        for (const auto& [k, s, p, o] : facts) {
            if (k != 'c' || s != who) continue;
            for (std::string cur = p; !cur.empty(); cur = in.parent.at(cur)) {
                if (cur == c) return true;
            }
        }
        return false;
    };
    for (;;) {
        std::set<std::string> individuals, literals;
        for (const auto& [k, s, p, o] : facts) {
            individuals.insert(s);
            if (k == 'o') individuals.insert(o);
            if (k == 'd') literals.insert(o);
        }
        std::set<Fact> fresh;
        for (const auto& r : in.rules) {
            std::vector<std::string> vars;
            std::map<std::string, bool> literal_var;
            for (const auto& a : r.body) {
                for (std::size_t i = 0; i < a.args.size(); ++i) {
                    if (!is_var(a.args[i])) continue;
                    if (std::find(vars.begin(), vars.end(), a.args[i]) == vars.end()) vars.push_back(a.args[i]);
                    if (a.kind == 'd' && i == 1) literal_var[a.args[i]] = true;
                }
            }
            std::map<std::string, std::string> bind;
            auto value = [&](const std::string& t) { return is_var(t) ? bind.at(t) : t; };
            auto satisfied = [&](const OAtom& a) {
                if (a.kind == 'c') return holds_class(value(a.args[0]), a.pred);
                return facts.count({a.kind, value(a.args[0]), a.pred, value(a.args[1])}) != 0;
            };
            auto rec = [&](auto&& self, std::size_t k) -> void {
                if (k == vars.size()) {
                    for (const auto& a : r.body) {
                        if (!satisfied(a)) return;
                    }
                    for (const auto& h : r.head) {
                        Fact f{h.kind, value(h.args[0]), h.pred, h.kind == 'c' ? "" : value(h.args[1])};
                        if (!facts.count(f)) fresh.insert(f);
                    }
                    return;
                }
                for (const auto& v : literal_var.count(vars[k]) ? literals : individuals) {
                    bind[vars[k]] = v;
                    self(self, k + 1);
                }
                bind.erase(vars[k]);
            };
            rec(rec, 0);
        }
        if (fresh.empty()) return facts;
        facts.insert(fresh.begin(), fresh.end());
    }
}

inline std::string oatom_text(const OAtom& a) {
    std::string out = a.pred + "(";
    for (std::size_t i = 0; i < a.args.size(); ++i) out += (i ? ", " : "") + a.args[i];
    return out + ")";
}

inline std::string rules_text(const Instance& in) {
    std::string out;
    for (const auto& r : in.rules) {
        out += "rule " + r.name + ": ";
        for (std::size_t i = 0; i < r.body.size(); ++i) out += (i ? " ^ " : "") + oatom_text(r.body[i]);
        out += " -> ";
        for (std::size_t i = 0; i < r.head.size(); ++i) out += (i ? " ^ " : "") + oatom_text(r.head[i]);
        out += "\n";
    }
    return out;
}

inline void add_fact(KnowledgeBase& kb, const Fact& f) {
    const auto& [k, s, p, o] = f;
    if (k == 'c') kb.assert_class(s, p);
    else if (k == 'o') kb.assert_object(s, p, o);
    else kb.assert_data(s, p, *Literal::parse(o));
}

/// Declarations plus the instance's initial facts.
inline KnowledgeBase instance_kb(const Instance& in) {
    KnowledgeBase kb;
    std::vector<std::pair<std::size_t, std::string>> order;
    for (const auto& [c, p] : in.parent) {
        std::size_t d = 0;
        for (std::string cur = p; !cur.empty(); cur = in.parent.at(cur)) ++d;
        order.emplace_back(d, c);
    }
    std::sort(order.begin(), order.end());
    for (const auto& [d, c] : order) {
        const auto& p = in.parent.at(c);
        kb.declare_concept(c, p.empty() ? std::nullopt : std::optional<std::string>(p));
    }
    for (const auto& p : in.object_props) kb.declare_property(p, PropertyKind::Object);
    for (const auto& p : in.data_props) kb.declare_property(p, PropertyKind::Data);
    for (const auto& f : in.facts) add_fact(kb, f);
    return kb;
}

/// Canonical text of the initial facts plus the oracle's derivations.
inline std::string oracle_fixpoint_text(const Instance& in) {
    auto kb = instance_kb(in);
    for (const auto& f : naive_fixpoint(in)) add_fact(kb, f);
    return serialize(kb);
}

/// Canonical text of the engine's fixpoint over the parsed rule text.
inline std::string engine_fixpoint_text(const Instance& in) {
    auto kb = instance_kb(in);
    RuleEngine engine;
    engine.evaluate(kb, parse_rules(rules_text(in)));
    return serialize(kb);
}

/// Random program: up to 20 individuals, up to 5 rules, a small concept tree, object and
/// data properties, constants in rules.
inline Instance random_instance(Rng& rng) {
    Instance in;
    const std::size_t concepts = 2 + pick(rng, 4);
    for (std::size_t i = 0; i < concepts; ++i) {
        std::string name = "C" + std::to_string(i);
        in.parent[name] = (i == 0 || coin(rng, 0.4)) ? "" : "C" + std::to_string(pick(rng, i));
    }
    in.object_props = {"p", "q", "r"};
    in.data_props = {"v"};
    const std::size_t n = 1 + pick(rng, 20);
    auto ind = [&] { return "i" + std::to_string(pick(rng, n)); };
    const std::array<std::string, 3> values = {"1", "2.5", "\"a\""};
    const std::size_t nfacts = pick(rng, 3 * n + 1);
    for (std::size_t k = 0; k < nfacts; ++k) {
        switch (pick(rng, 3)) {
        case 0: in.facts.insert({'c', ind(), "C" + std::to_string(pick(rng, concepts)), ""}); break;
        case 1: in.facts.insert({'o', ind(), in.object_props[pick(rng, 3)], ind()}); break;
        default: in.facts.insert({'d', ind(), "v", values[pick(rng, values.size())]}); break;
        }
    }
    for (std::size_t k = 0; k < n; ++k) in.facts.insert({'c', "i" + std::to_string(k), "C0", ""});

    const std::array<std::string, 3> ivars = {"?x", "?y", "?z"};
    const std::size_t nrules = 1 + pick(rng, 5);
    for (std::size_t k = 0; k < nrules; ++k) {
        ORule r;
        r.name = "r" + std::to_string(k);
        bool has_n = false;
        auto term = [&] { return coin(rng, 0.15) ? ind() : ivars[pick(rng, 3)]; };
        const std::size_t nb = 1 + pick(rng, 3);
        for (std::size_t j = 0; j < nb; ++j) {
            switch (pick(rng, 3)) {
            case 0: r.body.push_back({'c', "C" + std::to_string(pick(rng, concepts)), {term()}}); break;
            case 1: r.body.push_back({'o', in.object_props[pick(rng, 3)], {term(), term()}}); break;
            default:
                if (coin(rng)) {
                    r.body.push_back({'d', "v", {term(), "?n"}});
                    has_n = true;
                } else {
                    r.body.push_back({'d', "v", {term(), values[pick(rng, values.size())]}});
                }
            }
        }
        std::vector<std::string> bound;
        for (const auto& a : r.body) {
            for (std::size_t i = 0; i < a.args.size(); ++i) {
                if (is_var(a.args[i]) && a.args[i] != "?n") bound.push_back(a.args[i]);
            }
        }
        auto hterm = [&] { return bound.empty() || coin(rng, 0.1) ? ind() : bound[pick(rng, bound.size())]; };
        const std::size_t nh = 1 + pick(rng, 2);
        for (std::size_t j = 0; j < nh; ++j) {
            switch (pick(rng, 3)) {
            case 0: r.head.push_back({'c', "C" + std::to_string(pick(rng, concepts)), {hterm()}}); break;
            case 1: r.head.push_back({'o', in.object_props[pick(rng, 3)], {hterm(), hterm()}}); break;
            default:
                r.head.push_back({'d', "v", {hterm(), has_n && coin(rng) ? "?n" : values[pick(rng, values.size())]}});
            }
        }
        in.rules.push_back(std::move(r));
    }
    return in;
}

// ---- boxes ---------------------------------------------------------------------------

/// Coordinates on a 1/8 m lattice so that touching and coincident faces occur often and
/// all arithmetic below is exact.
inline Box3 lattice_box(Rng& rng, int span = 24, int max_size = 8) {
    Vec3 lo, hi;
    for (std::size_t k = 0; k < 3; ++k) {
        int a = static_cast<int>(pick(rng, static_cast<std::size_t>(span)));
        int w = static_cast<int>(pick(rng, static_cast<std::size_t>(max_size) + 1));
        lo[k] = a / 8.0;
        hi[k] = (a + w) / 8.0;
    }
    return Box3(lo, hi);
}

struct RelationTruth {
    bool intersect = false;
    bool touch = false;
    bool upper = false;
    bool connected = false;
};

/// Per-axis interval reasoning: the boxes share interior iff every pair of intervals does,
/// and their gap is the length of the vector of per-axis separations.
inline RelationTruth relation_oracle(const Box3& a, const Box3& b, const TopoConfig& cfg) {
    RelationTruth t;
    std::array<bool, 3> open{};
    double gap2 = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
        double lo = a.min[k] > b.min[k] ? a.min[k] : b.min[k];
        double hi = a.max[k] < b.max[k] ? a.max[k] : b.max[k];
        open[k] = hi - lo > cfg.overlap_epsilon;
        if (lo > hi) gap2 += (lo - hi) * (lo - hi);
    }
    t.intersect = open[0] && open[1] && open[2];
    t.touch = !t.intersect && gap2 <= cfg.touch_epsilon * cfg.touch_epsilon;
    t.upper = open[0] && open[1] && a.min.z + cfg.overlap_epsilon >= b.max.z;
    t.connected = t.intersect || t.touch;
    return t;
}

// ---- plans ---------------------------------------------------------------------------

/// Empty when `plan` is a valid ordering of `selected`, otherwise the first violation.
inline std::string check_plan(const ExecutionPlan& plan, const std::vector<std::string>& selected,
                              const AlgorithmRegistry& reg) {
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < plan.steps.size(); ++i) {
        if (!pos.emplace(plan.steps[i], i).second) return "duplicate step " + plan.steps[i];
    }
    std::set<std::string> want(selected.begin(), selected.end());
    if (want != std::set<std::string>(plan.steps.begin(), plan.steps.end())) return "steps differ from selection";
    for (const auto& s : plan.steps) {
        const auto& d = reg.at(s);
        if (d.successor && !(pos.at(*d.successor) < pos.at(s))) return s + " precedes " + *d.successor;
        for (DataKind in : d.inputs) {
            if (in == DataKind::PointCloud) continue;
            bool fed = false;
            for (const auto& o : plan.steps) {
                if (o != s && reg.at(o).outputs.count(in)) {
                    if (!(pos.at(o) < pos.at(s))) return s + " precedes producer " + o;
                    fed = true;
                }
            }
            if (!fed) return s + " has no producer";
        }
    }
    for (const auto& e : plan.edges) {
        if (!pos.count(e.producer) || !pos.count(e.consumer)) return "edge names unknown step";
        if (!(pos.at(e.producer) < pos.at(e.consumer))) return "edge runs backwards";
    }
    return {};
}

/// Algorithms named a0..a(n-1) in shuffled rows; each follows an earlier one in a hidden
/// order and consumes kinds produced earlier in that order.
inline AlgorithmRegistry random_dag_registry(Rng& rng, std::size_t n) {
    constexpr std::array<DataKind, 7> kinds = {DataKind::Point_2D, DataKind::SubPointCloud, DataKind::Line_3D,
                                               DataKind::Point_3D, DataKind::number,        DataKind::Boolean,
                                               DataKind::angle};
    std::vector<AlgorithmDescriptor> rows;
    std::map<DataKind, std::size_t> first_producer;
    for (std::size_t i = 0; i < n; ++i) {
        AlgorithmDescriptor d;
        d.name = "a" + std::to_string(i);
        d.inputs.insert(DataKind::PointCloud);
        if (i > 0 && coin(rng, 0.7)) d.successor = "a" + std::to_string(pick(rng, i));
        for (const auto& [k, who] : first_producer) {
            if (coin(rng, 0.3)) d.inputs.insert(k);
        }
        d.outputs.insert(kinds[pick(rng, kinds.size())]);
        for (auto k : d.outputs) first_producer.try_emplace(k, i);
        d.designed_for.insert(coin(rng) ? "vertical geometry" : "3D lines");
        rows.push_back(std::move(d));
    }
    // An input kind may only come from algorithms earlier in the hidden order.
    for (std::size_t i = 0; i < n; ++i) {
        std::set<DataKind> keep{DataKind::PointCloud};
        for (auto k : rows[i].inputs) {
            if (k == DataKind::PointCloud) continue;
            bool only_earlier = true;
            for (std::size_t j = i; j < n; ++j) only_earlier = only_earlier && !rows[j].outputs.count(k);
            if (only_earlier) keep.insert(k);
        }
        rows[i].inputs = keep;
    }
    std::shuffle(rows.begin(), rows.end(), rng);
    return AlgorithmRegistry(rows);
}

/// A registry whose successor links close a cycle of length `n`.
inline AlgorithmRegistry cycle_registry(Rng& rng, std::size_t n) {
    std::vector<AlgorithmDescriptor> rows;
    for (std::size_t i = 0; i < n; ++i) {
        AlgorithmDescriptor d;
        d.name = "c" + std::to_string(i);
        d.inputs = {DataKind::PointCloud};
        d.outputs = {DataKind::number};
        d.designed_for = {"vertical geometry"};
        d.successor = "c" + std::to_string((i + 1) % n);
        rows.push_back(std::move(d));
    }
    std::shuffle(rows.begin(), rows.end(), rng);
    return AlgorithmRegistry(rows);
}

// ---- lines ---------------------------------------------------------------------------

inline Vec3 random_unit(Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    for (;;) {
        Vec3 v{g(rng), g(rng), g(rng)};
        double n = std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
        if (n > 1e-3) return v / n;
    }
}

/// `inliers` samples along a 10 m segment with isotropic noise plus uniform outliers in
/// the surrounding 10 m cube.
inline PointCloud noisy_line(Rng& rng, Vec3 origin, Vec3 dir, std::size_t inliers, double sigma, std::size_t outliers) {
    std::normal_distribution<double> g(0.0, sigma > 0 ? sigma : 1.0);
    PointCloud pts;
    for (std::size_t i = 0; i < inliers; ++i) {
        Vec3 p = origin + dir * uniform(rng, -5.0, 5.0);
        if (sigma > 0) p = p + Vec3{g(rng), g(rng), g(rng)};
        pts.push_back(p);
    }
    for (std::size_t i = 0; i < outliers; ++i) {
        pts.push_back(origin + Vec3{uniform(rng, -5, 5), uniform(rng, -5, 5), uniform(rng, -5, 5)});
    }
    std::shuffle(pts.begin(), pts.end(), rng);
    return pts;
}

/// Undirected angle in radians via the law of cosines on unit vectors.
inline double angle_between(Vec3 a, Vec3 b) {
    a = a / std::sqrt(a.x * a.x + a.y * a.y + a.z * a.z);
    b = b / std::sqrt(b.x * b.x + b.y * b.y + b.z * b.z);
    Vec3 d = a - b, s = a + b;
    double chord = std::min(std::sqrt(d.x * d.x + d.y * d.y + d.z * d.z), std::sqrt(s.x * s.x + s.y * s.y + s.z * s.z));
    return 2.0 * std::asin(std::min(1.0, chord / 2.0));
}

struct SweepResult {
    std::size_t within = 0;   // seeds whose best line lies within the tolerance
    double worst_rad = 0.0;   // largest error over all seeds
};

/// One random line per seed, 200 inliers at `sigma` plus 100 outliers; the strongest
/// recovered line is compared with the truth.
inline SweepResult ransac_sweep(std::size_t seeds, double sigma, std::size_t outliers, double tol_rad) {
    SweepResult r;
    for (std::size_t s = 0; s < seeds; ++s) {
        Rng rng(1000 + s);
        Vec3 dir = random_unit(rng);
        Vec3 origin{uniform(rng, -20, 20), uniform(rng, -20, 20), uniform(rng, 0, 10)};
        auto pts = noisy_line(rng, origin, dir, 200, sigma, outliers);
        DetectorConfig cfg;
        cfg.seed = s;
        auto lines = ransac_lines_3d(pts, cfg);
        double err = lines.empty() ? std::numbers::pi / 2 : angle_between(lines.front().direction, dir);
        r.worst_rad = std::max(r.worst_rad, err);
        if (err <= tol_rad) ++r.within;
    }
    return r;
}

// ---- files ---------------------------------------------------------------------------

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::uint64_t counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("widop_" + tag + "_" + std::to_string(std::random_device{}()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

} // namespace widop::testing
