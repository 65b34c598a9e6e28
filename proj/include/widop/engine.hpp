// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The widop Authors

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "widop/error.hpp"
#include "widop/kb.hpp"
#include "widop/rules.hpp"

namespace widop {

struct EngineConfig {
    std::size_t max_iterations = 100;
    std::uint64_t seed = 0; // handed to stochastic built-ins
    bool trace = false;
};

enum class BuiltinKind { Filter, Generative };

/// What a built-in handler may touch while it runs.
struct BuiltinContext {
    KnowledgeBase& kb;
    const EngineConfig& config;
};

/// Argument vector for a generative call; unbound positions are empty.
using BuiltinArgs = std::vector<std::optional<Node>>;

struct BuiltinDescriptor {
    std::string ns;
    std::string name;
    BuiltinKind kind = BuiltinKind::Filter;
    std::size_t arity = 1;
    /// Generative only: positions that may be unbound at call time.
    std::vector<bool> may_be_unbound;
    bool memoize = true;
    /// Filter handler: every argument bound.
    std::function<bool(const std::vector<Node>&, BuiltinContext&)> filter;
    /// Generative handler: returns complete argument tuples agreeing with the bound positions.
    /// Must be finite and deterministic for fixed inputs.
    std::function<std::vector<std::vector<Node>>(const BuiltinArgs&, BuiltinContext&)> generate;

    std::string qualified_name() const { return ns + ":" + name; }
};

struct EvaluationReport {
    std::size_t iterations = 0;
    std::size_t assertions_added = 0;
    /// Handler invocations per built-in; memo hits are not counted.
    std::map<std::string, std::size_t> builtin_calls;
    /// `FIRE <rule> <binding> => <assertion>` lines when tracing.
    std::vector<std::string> trace;
};

/// Forward-chaining evaluator: naive iteration to a fixpoint under set semantics.
///
/// Each round matches every rule (in order) against the knowledge base as it stood at the
/// start of the round, then adds the instantiated consequents. Body atoms are matched left
/// to right; a built-in whose required arguments are not yet bound is postponed until they
/// are. Generative built-ins are memoized by their bound arguments for one evaluation.
class RuleEngine {
public:
    void register_builtin(BuiltinDescriptor d) {
        if (d.ns.empty() || d.name.empty()) throw EngineError("built-in needs a namespace and a name");
        if (d.arity == 0) throw EngineError("built-in '" + d.qualified_name() + "' needs arity >= 1");
        if (d.kind == BuiltinKind::Filter && !d.filter) {
            throw EngineError("filter built-in '" + d.qualified_name() + "' has no handler");
        }
        if (d.kind == BuiltinKind::Generative) {
            if (!d.generate) throw EngineError("generative built-in '" + d.qualified_name() + "' has no handler");
            if (d.may_be_unbound.size() != d.arity) {
                throw EngineError("binding pattern of '" + d.qualified_name() + "' does not match its arity");
            }
        }
        auto key = std::make_tuple(d.ns, d.name, d.arity);
        if (builtins_.count(key)) {
            throw EngineError("built-in '" + d.qualified_name() + "/" + std::to_string(d.arity) +
                              "' already registered");
        }
        builtins_.emplace(std::move(key), std::move(d));
    }

    const BuiltinDescriptor* find_builtin(const std::string& ns, const std::string& name, std::size_t arity) const {
        auto it = builtins_.find(std::make_tuple(ns, name, arity));
        return it == builtins_.end() ? nullptr : &it->second;
    }

    EvaluationReport evaluate(KnowledgeBase& kb, const std::vector<Rule>& rules, const EngineConfig& config = {}) const {
        if (config.max_iterations == 0) throw EngineError("max iterations must be at least 1");
        std::vector<Compiled> compiled;
        compiled.reserve(rules.size());
        for (const auto& r : rules) compiled.push_back(compile(kb, r));

        Session session{kb, config, {}, {}};
        const std::size_t start_size = kb.size();
        while (true) {
            if (++session.report.iterations > config.max_iterations) {
                throw EngineError("no fixpoint after " + std::to_string(config.max_iterations) + " iterations");
            }
            const std::size_t round_start = kb.size();
            std::vector<Assertion> pending;
            std::set<Assertion> seen;
            for (const auto& c : compiled) {
                fire(session, c, [&](const Binding& b, const Assertion& a) {
                    if (kb.contains(a) || !seen.insert(a).second) return;
                    pending.push_back(a);
                    if (config.trace) {
                        session.report.trace.push_back("FIRE " + c.rule->name + " " + binding_text(b) + " => " +
                                                       a.to_text());
                    }
                });
            }
            for (const auto& a : pending) add(kb, a, "");
            if (kb.size() == round_start) break;
        }
        session.report.assertions_added = kb.size() - start_size;
        return std::move(session.report);
    }

    /// Consequents one pass of `rule` would add, without touching `kb`.
    std::vector<Assertion> evaluate_single(const KnowledgeBase& kb, const Rule& rule, const EngineConfig& config = {}) const {
        KnowledgeBase scratch = kb;
        Compiled c = compile(scratch, rule);
        Session session{scratch, config, {}, {}};
        std::set<Assertion> out;
        fire(session, c, [&](const Binding&, const Assertion& a) {
            if (!kb.contains(a)) out.insert(a);
        });
        return {out.begin(), out.end()};
    }

private:
    using Binding = std::map<std::string, Node>;
    using MemoKey = std::pair<std::string, BuiltinArgs>;

    struct Compiled {
        const Rule* rule = nullptr;
        std::vector<std::size_t> order; // body atom indices in evaluation order
        std::vector<const BuiltinDescriptor*> builtins; // parallel to rule->body
    };

    struct Session {
        KnowledgeBase& kb;
        const EngineConfig& config;
        std::map<MemoKey, std::vector<std::vector<Node>>> memo;
        EvaluationReport report;
    };

    static std::string binding_text(const Binding& b) {
        std::string out = "{";
        bool first = true;
        for (const auto& [var, value] : b) {
            if (!first) out += ", ";
            first = false;
            out += "?" + var + "=" + node_text(value);
        }
        return out + "}";
    }

    static void collect_vars(const Atom& a, std::set<std::string>& into) {
        for (const auto& t : a.args) {
            if (const auto* v = std::get_if<Variable>(&t)) into.insert(v->name);
        }
    }

    static bool ready(const Atom& a, const BuiltinDescriptor& d, const std::set<std::string>& bound) {
        for (std::size_t i = 0; i < a.args.size(); ++i) {
            const auto* v = std::get_if<Variable>(&a.args[i]);
            if (!v || bound.count(v->name)) continue;
            if (d.kind == BuiltinKind::Filter || !d.may_be_unbound[i]) return false;
        }
        return true;
    }

    void check_atom(const KnowledgeBase& kb, const Rule& r, const Atom& a) const {
        auto fail = [&](const std::string& why) {
            throw EngineError("rule '" + r.name + "': " + why + " in atom " + a.to_text());
        };
        switch (a.kind) {
        case AtomKind::Class:
            if (!kb.has_concept(a.name)) fail("unknown concept '" + a.name + "'");
            break;
        case AtomKind::Property:
            if (!kb.property_kind(a.name)) fail("unknown property '" + a.name + "'");
            break;
        case AtomKind::Builtin:
            if (!find_builtin(a.ns, a.name, a.args.size())) {
                fail("unknown built-in '" + a.qualified_name() + "/" + std::to_string(a.args.size()) + "'");
            }
            break;
        default: break;
        }
    }

    Compiled compile(const KnowledgeBase& kb, const Rule& r) const {
        Compiled c;
        c.rule = &r;
        c.builtins.resize(r.body.size(), nullptr);
        for (const auto& a : r.body) check_atom(kb, r, a);
        for (const auto& a : r.head) {
            if (a.kind == AtomKind::Builtin) throw EngineError("rule '" + r.name + "': built-in in consequent");
            check_atom(kb, r, a);
        }

        std::set<std::string> bound;
        std::vector<std::size_t> deferred;
        auto drain = [&] {
            bool progress = true;
            while (progress) {
                progress = false;
                for (auto it = deferred.begin(); it != deferred.end(); ++it) {
                    if (ready(r.body[*it], *c.builtins[*it], bound)) {
                        c.order.push_back(*it);
                        collect_vars(r.body[*it], bound);
                        deferred.erase(it);
                        progress = true;
                        break;
                    }
                }
            }
        };
        for (std::size_t i = 0; i < r.body.size(); ++i) {
            const auto& a = r.body[i];
            if (a.kind == AtomKind::Builtin) {
                c.builtins[i] = find_builtin(a.ns, a.name, a.args.size());
                if (!ready(a, *c.builtins[i], bound)) {
                    deferred.push_back(i);
                    continue;
                }
            }
            c.order.push_back(i);
            collect_vars(a, bound);
            drain();
        }
        if (!deferred.empty()) {
            const auto& a = r.body[deferred.front()];
            const char* what = c.builtins[deferred.front()]->kind == BuiltinKind::Filter
                                   ? "filter built-in reached with an unbound argument"
                                   : "built-in needs arguments that are never bound";
            throw EngineError("rule '" + r.name + "': " + what + ": " + a.to_text());
        }
        return c;
    }

    static std::optional<Node> resolve(const Term& t, const Binding& b) {
        if (const auto* v = std::get_if<Variable>(&t)) {
            auto it = b.find(v->name);
            if (it == b.end()) return std::nullopt;
            return it->second;
        }
        if (const auto* i = std::get_if<Individual>(&t)) return Node{*i};
        return Node{std::get<Literal>(t)};
    }

    static bool equivalent(const KnowledgeBase& kb, const Node& a, const Node& b) {
        if (a == b) return true;
        const auto* ia = std::get_if<Individual>(&a);
        const auto* ib = std::get_if<Individual>(&b);
        if (!ia || !ib || kb.with_predicate(std::string(kSameAs)).empty()) return false;
        return kb.same_as(ia->id, ib->id);
    }

    /// Binds or checks `t` against `value`; returns false on conflict.
    static bool unify(const KnowledgeBase& kb, const Term& t, const Node& value, Binding& b,
                      std::vector<std::string>& newly) {
        if (auto cur = resolve(t, b)) return equivalent(kb, *cur, value);
        const auto& name = std::get<Variable>(t).name;
        b.emplace(name, value);
        newly.push_back(name);
        return true;
    }

    static void undo(Binding& b, const std::vector<std::string>& newly) {
        for (const auto& n : newly) b.erase(n);
    }

    template <typename Sink>
    void fire(Session& s, const Compiled& c, Sink&& sink) const {
        Binding b;
        auto emit = [&](const Binding& full) {
            for (const auto& h : c.rule->head) sink(full, instantiate(s.kb, *c.rule, h, full));
        };
        match(s, c, 0, b, emit);
    }

    template <typename Emit>
    void match(Session& s, const Compiled& c, std::size_t step, Binding& b, Emit& emit) const {
        if (step == c.order.size()) {
            emit(b);
            return;
        }
        const std::size_t idx = c.order[step];
        const Atom& a = c.rule->body[idx];
        const KnowledgeBase& kb = s.kb;
        auto descend = [&](const std::vector<std::pair<const Term*, Node>>& pairs) {
            std::vector<std::string> newly;
            bool ok = true;
            for (const auto& [term, value] : pairs) {
                if (!unify(kb, *term, value, b, newly)) {
                    ok = false;
                    break;
                }
            }
            if (ok) match(s, c, step + 1, b, emit);
            undo(b, newly);
        };

        switch (a.kind) {
        case AtomKind::Class: {
            if (auto v = resolve(a.args[0], b)) {
                const auto* ind = std::get_if<Individual>(&*v);
                if (ind && kb.is_instance_of(ind->id, a.name)) match(s, c, step + 1, b, emit);
                return;
            }
            std::set<std::string> members;
            for (const auto& sub : kb.descendants(a.name)) {
                for (const auto& fact : kb.with_predicate(sub)) {
                    if (fact.kind != AssertionKind::Class) continue;
                    for (const auto& who : kb.same_as_closure(fact.subject)) members.insert(who);
                }
            }
            for (const auto& m : members) descend({{&a.args[0], Node{Individual{m}}}});
            return;
        }
        case AtomKind::Property: {
            std::vector<Assertion> facts;
            for (const auto& fact : kb.with_predicate(a.name)) {
                if (fact.kind != AssertionKind::Class) facts.push_back(fact);
            }
            for (const auto& fact : facts) {
                descend({{&a.args[0], Node{Individual{fact.subject}}}, {&a.args[1], *fact.object}});
            }
            return;
        }
        case AtomKind::SameAs: {
            auto l = resolve(a.args[0], b);
            auto r = resolve(a.args[1], b);
            if (l && r) {
                if (equivalent(kb, *l, *r)) match(s, c, step + 1, b, emit);
                return;
            }
            std::vector<std::pair<Node, Node>> pairs;
            auto add_class = [&](const std::string& id) {
                for (const auto& other : kb.same_as_closure(id)) pairs.emplace_back(Individual{id}, Individual{other});
            };
            if (l || r) {
                const Node& known = l ? *l : *r;
                if (const auto* ind = std::get_if<Individual>(&known)) {
                    for (const auto& other : kb.same_as_closure(ind->id)) {
                        pairs.emplace_back(known, Individual{other});
                    }
                } else {
                    pairs.emplace_back(known, known);
                }
                for (const auto& [k, other] : pairs) {
                    if (l) descend({{&a.args[1], other}});
                    else descend({{&a.args[0], other}});
                }
                return;
            }
            for (const auto& id : kb.individuals()) add_class(id);
            for (const auto& [x, y] : pairs) descend({{&a.args[0], x}, {&a.args[1], y}});
            return;
        }
        case AtomKind::DifferentFrom: {
            auto l = resolve(a.args[0], b);
            auto r = resolve(a.args[1], b);
            if (l && r) {
                const auto* il = std::get_if<Individual>(&*l);
                const auto* ir = std::get_if<Individual>(&*r);
                if (il && ir && kb.different_from(il->id, ir->id)) match(s, c, step + 1, b, emit);
                return;
            }
            std::vector<std::pair<Node, Node>> pairs;
            for (const auto& fact : kb.with_predicate(std::string(kDifferentFrom))) {
                Node x = Individual{fact.subject};
                pairs.emplace_back(x, *fact.object);
                pairs.emplace_back(*fact.object, x);
            }
            for (const auto& [x, y] : pairs) descend({{&a.args[0], x}, {&a.args[1], y}});
            return;
        }
        case AtomKind::Builtin: {
            const BuiltinDescriptor& d = *c.builtins[idx];
            BuiltinArgs args;
            for (const auto& t : a.args) args.push_back(resolve(t, b));
            BuiltinContext ctx{s.kb, s.config};
            if (d.kind == BuiltinKind::Filter) {
                std::vector<Node> plain;
                for (auto& v : args) plain.push_back(*v);
                ++s.report.builtin_calls[d.qualified_name()];
                if (d.filter(plain, ctx)) match(s, c, step + 1, b, emit);
                return;
            }
            std::vector<std::vector<Node>> tuples;
            MemoKey key{d.qualified_name() + "/" + std::to_string(d.arity), args};
            auto hit = d.memoize ? s.memo.find(key) : s.memo.end();
            if (hit != s.memo.end()) {
                tuples = hit->second;
            } else {
                ++s.report.builtin_calls[d.qualified_name()];
                tuples = d.generate(args, ctx);
                if (d.memoize) s.memo.emplace(std::move(key), tuples);
            }
            for (const auto& tuple : tuples) {
                if (tuple.size() != a.args.size()) {
                    throw EngineError("built-in '" + d.qualified_name() + "' returned a tuple of wrong size");
                }
                std::vector<std::pair<const Term*, Node>> pairs;
                for (std::size_t i = 0; i < tuple.size(); ++i) pairs.emplace_back(&a.args[i], tuple[i]);
                descend(pairs);
            }
            return;
        }
        }
    }

    static Assertion instantiate(const KnowledgeBase& kb, const Rule& r, const Atom& h, const Binding& b) {
        auto fail = [&](const std::string& why) {
            throw EngineError("rule '" + r.name + "': cannot assert " + h.to_text() + ": " + why);
        };
        auto individual = [&](const Term& t) {
            auto v = resolve(t, b);
            const auto* ind = v ? std::get_if<Individual>(&*v) : nullptr;
            if (!ind) fail("argument is not an individual");
            return ind->id;
        };
        switch (h.kind) {
        case AtomKind::Class: return Assertion::class_of(individual(h.args[0]), h.name);
        case AtomKind::SameAs:
        case AtomKind::DifferentFrom:
            return Assertion::object_of(individual(h.args[0]), h.name, individual(h.args[1]));
        case AtomKind::Property: {
            auto kind = kb.property_kind(h.name);
            if (*kind == PropertyKind::Object) return Assertion::object_of(individual(h.args[0]), h.name, individual(h.args[1]));
            auto v = resolve(h.args[1], b);
            const auto* lit = v ? std::get_if<Literal>(&*v) : nullptr;
            if (!lit) fail("data property needs a literal");
            return Assertion::data_of(individual(h.args[0]), h.name, *lit);
        }
        case AtomKind::Builtin: break;
        }
        fail("built-in in consequent");
        return {};
    }

    static void add(KnowledgeBase& kb, const Assertion& a, const std::string&) {
        try {
            kb.assert_fact(a);
        } catch (const KbError& e) {
            throw EngineError(std::string("cannot assert ") + a.to_text() + ": " + e.what());
        }
    }

    std::map<std::tuple<std::string, std::string, std::size_t>, BuiltinDescriptor> builtins_;
};

// ---- swrlb comparison and arithmetic built-ins ----------------------------------

namespace detail {

/// <0, 0, >0 for comparable values (two numbers or two strings), nullopt otherwise.
inline std::optional<int> compare_nodes(const Node& a, const Node& b) {
    const auto* la = std::get_if<Literal>(&a);
    const auto* lb = std::get_if<Literal>(&b);
    if (!la || !lb) return std::nullopt;
    if (la->is_number() && lb->is_number()) {
        double x = la->as_number(), y = lb->as_number();
        return x < y ? -1 : (x > y ? 1 : 0);
    }
    if (la->is_text() && lb->is_text()) return la->as_text().compare(lb->as_text());
    return std::nullopt;
}

inline BuiltinDescriptor comparison(std::string name, std::function<bool(int)> accept) {
    BuiltinDescriptor d;
    d.ns = "swrlb";
    d.name = std::move(name);
    d.kind = BuiltinKind::Filter;
    d.arity = 2;
    d.filter = [accept = std::move(accept)](const std::vector<Node>& args, BuiltinContext&) {
        auto c = compare_nodes(args[0], args[1]);
        return c && accept(*c);
    };
    return d;
}

/// result = f(operands...) with the result in position 0, as in SWRL.
inline BuiltinDescriptor arithmetic(std::string name, std::size_t arity, std::function<double(const std::vector<double>&)> f) {
    BuiltinDescriptor d;
    d.ns = "swrlb";
    d.name = std::move(name);
    d.kind = BuiltinKind::Generative;
    d.arity = arity;
    d.may_be_unbound.assign(arity, false);
    d.may_be_unbound[0] = true;
    d.memoize = false;
    d.generate = [f = std::move(f)](const BuiltinArgs& args, BuiltinContext&) -> std::vector<std::vector<Node>> {
        std::vector<double> operands;
        for (std::size_t i = 1; i < args.size(); ++i) {
            const auto* lit = std::get_if<Literal>(&*args[i]);
            if (!lit || !lit->is_number()) return {};
            operands.push_back(lit->as_number());
        }
        double r = f(operands);
        if (!std::isfinite(r)) return {};
        std::vector<Node> tuple;
        tuple.push_back(Literal::number(r));
        for (std::size_t i = 1; i < args.size(); ++i) tuple.push_back(*args[i]);
        if (args[0]) {
            const auto* lit = std::get_if<Literal>(&*args[0]);
            if (!lit || !lit->is_number() || lit->as_number() != r) return {};
        }
        return {tuple};
    };
    return d;
}

} // namespace detail

/// swrlb:{greaterThan, moreThan, lessThan, equal, notEqual, greaterThanOrEqual,
/// lessThanOrEqual, add, subtract, abs}. `moreThan` is an alias of `greaterThan`.
inline void register_standard_builtins(RuleEngine& engine) {
    engine.register_builtin(detail::comparison("greaterThan", [](int c) { return c > 0; }));
    engine.register_builtin(detail::comparison("moreThan", [](int c) { return c > 0; }));
    engine.register_builtin(detail::comparison("lessThan", [](int c) { return c < 0; }));
    engine.register_builtin(detail::comparison("greaterThanOrEqual", [](int c) { return c >= 0; }));
    engine.register_builtin(detail::comparison("lessThanOrEqual", [](int c) { return c <= 0; }));

    BuiltinDescriptor eq;
    eq.ns = "swrlb";
    eq.name = "equal";
    eq.arity = 2;
    eq.filter = [](const std::vector<Node>& a, BuiltinContext&) {
        auto c = detail::compare_nodes(a[0], a[1]);
        return c ? *c == 0 : a[0] == a[1];
    };
    BuiltinDescriptor ne = eq;
    ne.name = "notEqual";
    ne.filter = [](const std::vector<Node>& a, BuiltinContext&) {
        auto c = detail::compare_nodes(a[0], a[1]);
        return c ? *c != 0 : a[0] != a[1];
    };
    engine.register_builtin(std::move(eq));
    engine.register_builtin(std::move(ne));

    engine.register_builtin(detail::arithmetic("add", 3, [](const auto& v) { return v[0] + v[1]; }));
    engine.register_builtin(detail::arithmetic("subtract", 3, [](const auto& v) { return v[0] - v[1]; }));
    engine.register_builtin(detail::arithmetic("abs", 2, [](const auto& v) { return std::abs(v[0]); }));
}

} // namespace widop
