// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The widop Authors

#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace widop;
using widop::testing::Rng;

namespace {

KnowledgeBase family() {
    KnowledgeBase kb;
    kb.declare_concept("Person");
    kb.declare_concept("Tall", "Person");
    kb.declare_property("hasParent", PropertyKind::Object);
    kb.declare_property("hasBrother", PropertyKind::Object);
    kb.declare_property("hasUncle", PropertyKind::Object);
    kb.declare_property("height", PropertyKind::Data);
    kb.declare_property("next", PropertyKind::Data);
    return kb;
}

RuleEngine standard_engine() {
    RuleEngine e;
    register_standard_builtins(e);
    return e;
}

} // namespace

TEST_CASE("uncle rule derives exactly one assertion", "[engine]") {
    auto kb = family();
    kb.assert_object("ann", "hasParent", "bob");
    kb.assert_object("bob", "hasBrother", "carl");
    kb.assert_object("dan", "hasBrother", "eve");
    const auto before = kb.assertions();
    RuleEngine engine;
    auto report = engine.evaluate(kb, parse_rules("rule uncle: hasParent(?x, ?y) ^ hasBrother(?y, ?z) -> hasUncle(?x, ?z)"));
    CHECK(report.assertions_added == 1);
    CHECK(report.iterations == 2);
    std::set<Assertion> added;
    std::set_difference(kb.assertions().begin(), kb.assertions().end(), before.begin(), before.end(),
                        std::inserter(added, added.end()));
    CHECK(added == std::set<Assertion>{Assertion::object_of("ann", "hasUncle", "carl")});
}

TEST_CASE("fixpoint matches the naive oracle", "[engine][property]") {
    Rng rng(2026);
    for (int i = 0; i < 250; ++i) {
        auto in = widop::testing::random_instance(rng);
        INFO(widop::testing::rules_text(in));
        CHECK(widop::testing::engine_fixpoint_text(in) == widop::testing::oracle_fixpoint_text(in));
    }
}

TEST_CASE("re-evaluation at a fixpoint adds nothing", "[engine][property]") {
    Rng rng(44);
    RuleEngine engine;
    for (int i = 0; i < 50; ++i) {
        auto in = widop::testing::random_instance(rng);
        auto kb = widop::testing::instance_kb(in);
        auto rules = parse_rules(widop::testing::rules_text(in));
        engine.evaluate(kb, rules);
        auto again = engine.evaluate(kb, rules);
        CHECK(again.assertions_added == 0);
        CHECK(again.iterations == 1);
    }
}

TEST_CASE("class atoms see subconcepts", "[engine]") {
    auto kb = family();
    kb.assert_class("a", "Tall");
    RuleEngine engine;
    engine.evaluate(kb, parse_rules("rule p: Person(?x) -> hasParent(?x, root)"));
    CHECK(kb.contains(Assertion::object_of("a", "hasParent", "root")));
}

TEST_CASE("comparison built-ins filter bindings", "[engine]") {
    auto kb = family();
    for (auto [who, h] : {std::pair{"a", 7.0}, {"b", 6.0}, {"c", 5.5}}) kb.assert_data(who, "height", Literal::number(h));
    kb.assert_data("d", "height", Literal::text("tall"));
    auto engine = standard_engine();
    std::vector<Diagnostic> notes;
    auto rules = parse_rules("rule t: height(?x, ?h) ^ swrlb:moreThan(?h, 6) -> Tall(?x)\n"
                             "rule s: height(?x, ?h) ^ swrlb:lessThanOrEqual(?h, 6) -> Person(?x)",
                             &notes);
    engine.evaluate(kb, rules);
    CHECK(notes.size() == 1);
    CHECK(kb.is_instance_of("a", "Tall"));
    CHECK_FALSE(kb.is_instance_of("b", "Tall"));
    CHECK(kb.classes_of("b") == std::vector<std::string>{"Person"});
    CHECK(kb.classes_of("c") == std::vector<std::string>{"Person"});
    CHECK(kb.classes_of("d").empty());
}

TEST_CASE("a built-in waits for its inputs", "[engine]") {
    auto kb = family();
    kb.assert_data("a", "height", Literal::number(2));
    auto engine = standard_engine();
    engine.evaluate(kb, parse_rules("rule n: swrlb:add(?m, ?h, 1) ^ height(?x, ?h) -> next(?x, ?m)"));
    CHECK(kb.data_value("a", "next") == Literal::number(3));
}

TEST_CASE("compile-time errors", "[engine]") {
    auto kb = family();
    auto engine = standard_engine();
    CHECK_THROWS_AS(engine.evaluate(kb, parse_rules("rule e: Nope(?x) -> Person(?x)")), EngineError);
    CHECK_THROWS_AS(engine.evaluate(kb, parse_rules("rule e: Person(?x) -> nope(?x, 1)")), EngineError);
    CHECK_THROWS_AS(engine.evaluate(kb, parse_rules("rule e: Person(?x) ^ swrlb:nope(?x) -> Tall(?x)")), EngineError);
    CHECK_THROWS_AS(engine.evaluate(kb, parse_rules("rule e: Person(?x) ^ swrlb:lessThan(?x, ?y) -> Tall(?x)")),
                    EngineError);
    CHECK_THROWS_AS(engine.evaluate(kb, {}, EngineConfig{0, 0, false}), EngineError);
    CHECK_THROWS_AS(engine.register_builtin(detail::comparison("greaterThan", [](int c) { return c > 0; })), EngineError);
}

TEST_CASE("ill-typed consequents are engine errors", "[engine]") {
    auto kb = family();
    kb.assert_data("a", "height", Literal::number(1));
    RuleEngine engine;
    CHECK_THROWS_AS(engine.evaluate(kb, parse_rules("rule e: height(?x, ?h) -> hasParent(?x, ?h)")), EngineError);
}

TEST_CASE("divergent programs hit the iteration limit", "[engine]") {
    auto kb = family();
    kb.assert_data("a", "next", Literal::number(0));
    auto engine = standard_engine();
    auto rules = parse_rules("rule inc: next(?x, ?n) ^ swrlb:add(?m, ?n, 1) -> next(?x, ?m)");
    CHECK_THROWS_AS(engine.evaluate(kb, rules, EngineConfig{25, 0, false}), EngineError);
}

TEST_CASE("trace lines name rule, binding and assertion", "[engine]") {
    auto kb = family();
    kb.assert_object("ann", "hasParent", "bob");
    kb.assert_object("bob", "hasBrother", "carl");
    RuleEngine engine;
    auto report = engine.evaluate(kb, parse_rules("rule uncle: hasParent(?x, ?y) ^ hasBrother(?y, ?z) -> hasUncle(?x, ?z)"),
                                  EngineConfig{10, 0, true});
    REQUIRE(report.trace.size() == 1);
    CHECK(report.trace[0] == "FIRE uncle {?x=ann, ?y=bob, ?z=carl} => hasUncle(ann, carl)");
}

TEST_CASE("generative built-ins are memoized per evaluation", "[engine]") {
    auto kb = family();
    for (const char* who : {"a", "b", "c"}) kb.assert_class(who, "Person");
    std::size_t calls = 0;
    RuleEngine engine;
    BuiltinDescriptor d;
    d.ns = "t";
    d.name = "const";
    d.kind = BuiltinKind::Generative;
    d.arity = 1;
    d.may_be_unbound = {true};
    d.generate = [&calls](const BuiltinArgs&, BuiltinContext&) {
        ++calls;
        return std::vector<std::vector<Node>>{{Literal::number(4)}};
    };
    engine.register_builtin(d);
    auto report = engine.evaluate(kb, parse_rules("rule g: Person(?x) ^ t:const(?v) -> height(?x, ?v)"));
    CHECK(calls == 1);
    CHECK(report.builtin_calls.at("t:const") == 1);
    CHECK(kb.data_values("c", "height") == std::vector<Literal>{Literal::number(4)});
}

TEST_CASE("sameAs atoms match the closure", "[engine]") {
    auto kb = family();
    kb.assert_class("a", "Person");
    kb.assert_object("a", "sameAs", "b");
    RuleEngine engine;
    engine.evaluate(kb, parse_rules("rule s: sameAs(?x, ?y) ^ Person(?y) -> Tall(?x)"));
    CHECK(kb.contains(Assertion::class_of("b", "Tall")));
}

TEST_CASE("single-rule preview leaves the KB untouched", "[engine]") {
    auto kb = family();
    kb.assert_object("ann", "hasParent", "bob");
    kb.assert_object("bob", "hasBrother", "carl");
    const auto text = serialize(kb);
    RuleEngine engine;
    auto out = engine.evaluate_single(kb, parse_rule("rule u: hasParent(?x, ?y) ^ hasBrother(?y, ?z) -> hasUncle(?x, ?z)"));
    CHECK(out.size() == 1);
    CHECK(serialize(kb) == text);
}
