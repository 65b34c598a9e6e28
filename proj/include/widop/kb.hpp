// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The widop Authors

#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "widop/error.hpp"
#include "widop/geometry.hpp"
#include "widop/text.hpp"

namespace widop {

inline constexpr std::string_view kSameAs = "sameAs";
inline constexpr std::string_view kDifferentFrom = "differentFrom";
/// Root concept under which geometry attachments are allowed.
inline constexpr std::string_view kGeometryConcept = "Geometry";

/// Typed data value: 64-bit float, boolean or string.
class Literal {
public:
    using Value = std::variant<double, bool, std::string>;

    static Literal number(double v) {
        if (!std::isfinite(v)) throw KbError("numeric literal must be finite");
        return Literal(Value{std::in_place_index<0>, v});
    }
    static Literal boolean(bool v) { return Literal(Value{std::in_place_index<1>, v}); }
    static Literal text(std::string v) { return Literal(Value{std::in_place_index<2>, std::move(v)}); }

    bool is_number() const { return value_.index() == 0; }
    bool is_boolean() const { return value_.index() == 1; }
    bool is_text() const { return value_.index() == 2; }
    double as_number() const { return std::get<0>(value_); }
    bool as_boolean() const { return std::get<1>(value_); }
    const std::string& as_text() const { return std::get<2>(value_); }
    const Value& value() const { return value_; }

    /// Surface form shared by the KB file and the rule language: 5, true, "abc".
    std::string to_text() const {
        switch (value_.index()) {
        case 0: return text::format_double(as_number());
        case 1: return as_boolean() ? "true" : "false";
        default: return text::quote(as_text());
        }
    }

    static std::optional<Literal> parse(std::string_view token) {
        if (token == "true") return boolean(true);
        if (token == "false") return boolean(false);
        if (!token.empty() && token.front() == '"') {
            auto s = text::unquote(token);
            if (!s) return std::nullopt;
            return Literal::text(std::move(*s));
        }
        if (auto d = text::parse_double(token)) return number(*d);
        return std::nullopt;
    }

    friend bool operator==(const Literal& a, const Literal& b) { return a.value_ == b.value_; }
    friend bool operator<(const Literal& a, const Literal& b) { return a.value_ < b.value_; }

private:
    explicit Literal(Value v) : value_(std::move(v)) {}
    Value value_;
};

struct Individual {
    std::string id;
    friend bool operator==(const Individual&, const Individual&) = default;
    friend bool operator<(const Individual& a, const Individual& b) { return a.id < b.id; }
};

/// A term value after binding: an individual or a literal.
using Node = std::variant<Individual, Literal>;

inline std::string node_text(const Node& n) {
    if (const auto* ind = std::get_if<Individual>(&n)) return ind->id;
    return std::get<Literal>(n).to_text();
}

enum class AssertionKind { Class, Object, Data };
enum class PropertyKind { Object, Data };

inline std::string_view to_string(PropertyKind k) { return k == PropertyKind::Object ? "object" : "data"; }

/// One ABox fact. Class assertions have no object; their predicate is the concept.
struct Assertion {
    AssertionKind kind = AssertionKind::Class;
    std::string subject;
    std::string predicate;
    std::optional<Node> object;

    static Assertion class_of(std::string individual, std::string concept_name) {
        return {AssertionKind::Class, std::move(individual), std::move(concept_name), std::nullopt};
    }
    static Assertion object_of(std::string subject, std::string property, std::string target) {
        return {AssertionKind::Object, std::move(subject), std::move(property),
                Node{Individual{std::move(target)}}};
    }
    static Assertion data_of(std::string subject, std::string property, Literal value) {
        return {AssertionKind::Data, std::move(subject), std::move(property), Node{std::move(value)}};
    }

    /// `Concept(a)` or `prop(a, b)`.
    std::string to_text() const {
        if (kind == AssertionKind::Class) return predicate + "(" + subject + ")";
        return predicate + "(" + subject + ", " + node_text(*object) + ")";
    }

    friend bool operator==(const Assertion&, const Assertion&) = default;
    friend bool operator<(const Assertion& a, const Assertion& b) {
        return std::tie(a.subject, a.predicate, a.object, a.kind) <
               std::tie(b.subject, b.predicate, b.object, b.kind);
    }
};

/// Query pattern; an empty field is a wildcard.
struct Pattern {
    std::optional<AssertionKind> kind;
    std::optional<std::string> subject;
    std::optional<std::string> predicate;
    std::optional<Node> object;
};

/// Geometry payloads attached to one individual.
struct GeometryRecord {
    std::optional<Box3> box;
    std::vector<Line3> lines;
    std::vector<Plane3> planes;
    friend bool operator==(const GeometryRecord&, const GeometryRecord&) = default;
};

/// Concept tree (TBox), property declarations, ABox assertions and geometry attachments.
///
/// Single writer: const member functions keep no hidden caches, so concurrent readers are
/// safe between mutations.
class KnowledgeBase {
public:
    // ---- TBox ----------------------------------------------------------------

    void declare_concept(const std::string& name, const std::optional<std::string>& parent = std::nullopt) {
        if (!text::is_identifier(name)) throw KbError("invalid concept name '" + name + "'");
        if (parent && *parent == name) throw KbError("concept '" + name + "' cannot be its own parent (cycle)");
        if (concepts_.count(name)) throw KbError("concept '" + name + "' already declared");
        if (parent && !concepts_.count(*parent)) {
            throw KbError("unknown parent concept '" + *parent + "' for '" + name + "'");
        }
        // A fresh name cannot close a cycle through existing edges; the checks above suffice.
        concepts_.emplace(name, parent);
    }

    void declare_property(const std::string& name, PropertyKind kind) {
        if (!text::is_identifier(name)) throw KbError("invalid property name '" + name + "'");
        if (name == kSameAs || name == kDifferentFrom) {
            throw KbError("'" + name + "' is reserved and cannot be declared");
        }
        if (properties_.count(name)) throw KbError("property '" + name + "' already declared");
        properties_.emplace(name, kind);
    }

    bool has_concept(std::string_view name) const { return concepts_.find(std::string(name)) != concepts_.end(); }

    std::optional<PropertyKind> property_kind(std::string_view name) const {
        auto it = properties_.find(std::string(name));
        if (it == properties_.end()) return std::nullopt;
        return it->second;
    }

    std::optional<std::string> parent_of(const std::string& concept_name) const {
        return require_concept(concept_name)->second;
    }

    /// Number of ancestors: roots have depth 0.
    std::size_t depth(const std::string& concept_name) const {
        std::size_t d = 0;
        auto p = parent_of(concept_name);
        while (p) {
            ++d;
            p = concepts_.at(*p);
        }
        return d;
    }

    /// Reflexive, transitive subsumption: `sub` equals `super` or lies below it.
    bool is_subconcept(const std::string& sub, const std::string& super) const {
        require_concept(super);
        std::optional<std::string> cur = sub;
        require_concept(sub);
        while (cur) {
            if (*cur == super) return true;
            cur = concepts_.at(*cur);
        }
        return false;
    }

    /// `concept_name` and everything below it.
    std::set<std::string> descendants(const std::string& concept_name) const {
        require_concept(concept_name);
        std::set<std::string> out;
        for (const auto& [name, parent] : concepts_) {
            if (is_subconcept(name, concept_name)) out.insert(name);
        }
        return out;
    }

    /// Path from `concept_name` up to its root, inclusive on both ends.
    std::vector<std::string> ancestors(const std::string& concept_name) const {
        std::vector<std::string> out{concept_name};
        auto p = parent_of(concept_name);
        while (p) {
            out.push_back(*p);
            p = concepts_.at(*p);
        }
        return out;
    }

    const std::map<std::string, std::optional<std::string>>& concepts() const { return concepts_; }
    const std::map<std::string, PropertyKind>& properties() const { return properties_; }

    // ---- ABox ----------------------------------------------------------------

    /// Inserts `a` after schema checks; returns false when it was already present.
    bool assert_fact(const Assertion& a) {
        validate(a);
        auto [it, inserted] = assertions_.insert(a);
        if (!inserted) return false;
        by_predicate_[a.predicate].insert(a);
        individuals_.insert(a.subject);
        if (a.object) {
            if (const auto* ind = std::get_if<Individual>(&*a.object)) individuals_.insert(ind->id);
        }
        return true;
    }

    bool assert_class(const std::string& individual, const std::string& concept_name) {
        return assert_fact(Assertion::class_of(individual, concept_name));
    }
    bool assert_object(const std::string& subject, const std::string& property, const std::string& target) {
        return assert_fact(Assertion::object_of(subject, property, target));
    }
    bool assert_data(const std::string& subject, const std::string& property, Literal value) {
        return assert_fact(Assertion::data_of(subject, property, std::move(value)));
    }

    bool contains(const Assertion& a) const { return assertions_.count(a) != 0; }
    std::size_t size() const { return assertions_.size(); }
    const std::set<Assertion>& assertions() const { return assertions_; }
    const std::set<std::string>& individuals() const { return individuals_; }
    bool has_individual(const std::string& id) const { return individuals_.count(id) != 0; }

    /// Assertions whose predicate is exactly `predicate` (no subsumption).
    const std::set<Assertion>& with_predicate(const std::string& predicate) const {
        static const std::set<Assertion> empty;
        auto it = by_predicate_.find(predicate);
        return it == by_predicate_.end() ? empty : it->second;
    }

    /// All stored assertions with the given subject, in canonical order.
    std::vector<Assertion> about(const std::string& subject) const {
        std::vector<Assertion> out;
        Assertion probe{AssertionKind::Class, subject, std::string{}, std::nullopt};
        for (auto it = assertions_.lower_bound(probe); it != assertions_.end() && it->subject == subject; ++it) {
            out.push_back(*it);
        }
        return out;
    }

    /// Concepts directly asserted on `individual` (no sameAs expansion).
    std::vector<std::string> classes_of(const std::string& individual) const {
        std::vector<std::string> out;
        for (const auto& a : about(individual)) {
            if (a.kind == AssertionKind::Class) out.push_back(a.predicate);
        }
        return out;
    }

    std::vector<Literal> data_values(const std::string& individual, const std::string& property) const {
        std::vector<Literal> out;
        for (const auto& a : about(individual)) {
            if (a.kind == AssertionKind::Data && a.predicate == property) out.push_back(std::get<Literal>(*a.object));
        }
        return out;
    }

    std::optional<Literal> data_value(const std::string& individual, const std::string& property) const {
        auto v = data_values(individual, property);
        if (v.empty()) return std::nullopt;
        return v.front();
    }

    std::vector<std::string> object_values(const std::string& individual, const std::string& property) const {
        std::vector<std::string> out;
        for (const auto& a : about(individual)) {
            if (a.kind == AssertionKind::Object && a.predicate == property) {
                out.push_back(std::get<Individual>(*a.object).id);
            }
        }
        return out;
    }

    /// Individuals linked to `individual` by asserted sameAs, transitively; always includes itself.
    std::set<std::string> same_as_closure(const std::string& individual) const {
        std::set<std::string> seen{individual};
        const auto& links = with_predicate(std::string(kSameAs));
        if (links.empty()) return seen;
        std::deque<std::string> todo{individual};
        while (!todo.empty()) {
            auto cur = todo.front();
            todo.pop_front();
            for (const auto& a : links) {
                const auto& other = std::get<Individual>(*a.object).id;
                const std::string* next = nullptr;
                if (a.subject == cur) next = &other;
                else if (other == cur) next = &a.subject;
                if (next && seen.insert(*next).second) todo.push_back(*next);
            }
        }
        return seen;
    }

    bool same_as(const std::string& a, const std::string& b) const { return same_as_closure(a).count(b) != 0; }

    /// True when differentFrom was asserted between the two (either direction).
    bool different_from(const std::string& a, const std::string& b) const {
        const std::string p(kDifferentFrom);
        return contains(Assertion::object_of(a, p, b)) || contains(Assertion::object_of(b, p, a));
    }

    /// Class membership modulo subsumption and sameAs.
    bool is_instance_of(const std::string& individual, const std::string& concept_name) const {
        require_concept(concept_name);
        for (const auto& who : same_as_closure(individual)) {
            for (const auto& c : classes_of(who)) {
                if (is_subconcept(c, concept_name)) return true;
            }
        }
        return false;
    }

    /// Assertions matching `p`, in canonical order. A predicate naming a concept also matches
    /// class assertions on its subconcepts; subject and individual objects match through sameAs.
    std::vector<Assertion> query(const Pattern& p) const {
        std::optional<std::set<std::string>> subjects;
        if (p.subject) subjects = same_as_closure(*p.subject);
        std::optional<std::set<std::string>> objects;
        if (p.object) {
            if (const auto* ind = std::get_if<Individual>(&*p.object)) objects = same_as_closure(ind->id);
        }
        std::optional<std::set<std::string>> classes;
        if (p.predicate && has_concept(*p.predicate)) classes = descendants(*p.predicate);

        std::vector<Assertion> out;
        for (const auto& a : assertions_) {
            if (p.kind && a.kind != *p.kind) continue;
            if (subjects && !subjects->count(a.subject)) continue;
            if (p.predicate) {
                bool ok = a.predicate == *p.predicate;
                if (a.kind == AssertionKind::Class) ok = classes && classes->count(a.predicate);
                if (!ok) continue;
            }
            if (p.object) {
                if (!a.object) continue;
                if (objects) {
                    const auto* ind = std::get_if<Individual>(&*a.object);
                    if (!ind || !objects->count(ind->id)) continue;
                } else if (*a.object != *p.object) {
                    continue;
                }
            }
            out.push_back(a);
        }
        return out;
    }

    /// Mints `<prefix>_<n>` with the smallest unused n >= 1 and asserts it into `concept_name`.
    std::string mint(std::string_view prefix, const std::string& concept_name) {
        for (std::size_t n = 1;; ++n) {
            std::string id = std::string(prefix) + "_" + std::to_string(n);
            if (!individuals_.count(id)) {
                assert_class(id, concept_name);
                return id;
            }
        }
    }

    // ---- geometry attachments --------------------------------------------------

    void attach_box(const std::string& individual, const Box3& box) { geometry_slot(individual).box = box; }
    void attach_line(const std::string& individual, const Line3& line) { geometry_slot(individual).lines.push_back(line); }
    void attach_plane(const std::string& individual, const Plane3& plane) {
        geometry_slot(individual).planes.push_back(plane);
    }

    const GeometryRecord* geometry(const std::string& individual) const {
        auto it = geometry_.find(individual);
        return it == geometry_.end() ? nullptr : &it->second;
    }

    const std::map<std::string, GeometryRecord>& geometries() const { return geometry_; }

    /// Individuals carrying a box, in lexicographic order.
    std::vector<std::string> boxed_individuals() const {
        std::vector<std::string> out;
        for (const auto& [id, rec] : geometry_) {
            if (rec.box) out.push_back(id);
        }
        return out;
    }

    friend bool operator==(const KnowledgeBase& a, const KnowledgeBase& b) {
        return a.concepts_ == b.concepts_ && a.properties_ == b.properties_ && a.assertions_ == b.assertions_ &&
               a.geometry_ == b.geometry_;
    }

private:
    std::map<std::string, std::optional<std::string>>::const_iterator require_concept(const std::string& name) const {
        auto it = concepts_.find(name);
        if (it == concepts_.end()) throw KbError("unknown concept '" + name + "'");
        return it;
    }

    void validate(const Assertion& a) const {
        if (!text::is_identifier(a.subject)) throw KbError("invalid individual name '" + a.subject + "'");
        switch (a.kind) {
        case AssertionKind::Class:
            if (a.object) throw KbError("class assertion cannot carry an object");
            if (!has_concept(a.predicate)) throw KbError("undeclared concept '" + a.predicate + "'");
            return;
        case AssertionKind::Object: {
            bool reserved = a.predicate == kSameAs || a.predicate == kDifferentFrom;
            auto kind = property_kind(a.predicate);
            if (!reserved && !kind) throw KbError("undeclared property '" + a.predicate + "'");
            if (kind && *kind != PropertyKind::Object) {
                throw KbError("kind mismatch: '" + a.predicate + "' is a data property");
            }
            const Individual* target = a.object ? std::get_if<Individual>(&*a.object) : nullptr;
            if (!target) throw KbError("kind mismatch: object property '" + a.predicate + "' needs an individual");
            if (!text::is_identifier(target->id)) throw KbError("invalid individual name '" + target->id + "'");
            return;
        }
        case AssertionKind::Data: {
            auto kind = property_kind(a.predicate);
            if (!kind) throw KbError("undeclared property '" + a.predicate + "'");
            if (*kind != PropertyKind::Data) {
                throw KbError("kind mismatch: '" + a.predicate + "' is an object property");
            }
            if (!a.object || !std::holds_alternative<Literal>(*a.object)) {
                throw KbError("kind mismatch: data property '" + a.predicate + "' needs a literal");
            }
            return;
        }
        }
    }

    GeometryRecord& geometry_slot(const std::string& individual) {
        if (!has_concept(kGeometryConcept)) {
            throw KbError("geometry attachments need the '" + std::string(kGeometryConcept) + "' concept");
        }
        if (!is_instance_of(individual, std::string(kGeometryConcept))) {
            throw KbError("'" + individual + "' is not a Geometry individual");
        }
        return geometry_[individual];
    }

    std::map<std::string, std::optional<std::string>> concepts_;
    std::map<std::string, PropertyKind> properties_;
    std::set<Assertion> assertions_;
    std::map<std::string, std::set<Assertion>> by_predicate_;
    std::set<std::string> individuals_;
    std::map<std::string, GeometryRecord> geometry_;
};

} // namespace widop
