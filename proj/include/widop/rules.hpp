// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The widop Authors

#pragma once

#include <algorithm>
#include <cctype>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "widop/error.hpp"
#include "widop/kb.hpp"
#include "widop/text.hpp"

// Horn-rule language:
//
//   ruleset := rule*
//   rule    := "rule" IDENT ":" body "->" head
//   body    := atom ("^" atom)*
//   head    := atom ("^" atom)*
//   atom    := (NS ":")? IDENT "(" term ("," term)* ")"
//   term    := "?" IDENT | NUMBER | STRING | IDENT
//
// `true` / `false` are boolean literals, `//` starts a comment, and the UTF-8 glyphs
// "∧" and "→" are accepted for "^" and "->". An unnamespaced unary atom is a class atom,
// an unnamespaced binary atom a property atom (object or data is resolved against the
// knowledge base at evaluation time); `sameAs` and `differentFrom` are reserved.

namespace widop {

struct Variable {
    std::string name;
    friend bool operator==(const Variable&, const Variable&) = default;
    friend bool operator<(const Variable& a, const Variable& b) { return a.name < b.name; }
};

using Term = std::variant<Variable, Individual, Literal>;

inline std::string term_text(const Term& t) {
    if (const auto* v = std::get_if<Variable>(&t)) return "?" + v->name;
    if (const auto* i = std::get_if<Individual>(&t)) return i->id;
    return std::get<Literal>(t).to_text();
}

enum class AtomKind { Class, Property, SameAs, DifferentFrom, Builtin };

struct Atom {
    AtomKind kind = AtomKind::Class;
    std::string ns;   // built-ins only
    std::string name; // concept, property or built-in name
    std::vector<Term> args;

    std::string qualified_name() const { return ns.empty() ? name : ns + ":" + name; }

    std::string to_text() const {
        std::string out = qualified_name() + "(";
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (i) out += ", ";
            out += term_text(args[i]);
        }
        return out + ")";
    }

    friend bool operator==(const Atom&, const Atom&) = default;
};

struct Rule {
    std::string name;
    std::vector<Atom> body;
    std::vector<Atom> head;
    std::size_t line = 0; // source line of the `rule` keyword; not part of equality

    friend bool operator==(const Rule& a, const Rule& b) {
        return a.name == b.name && a.body == b.body && a.head == b.head;
    }
};

struct Diagnostic {
    std::size_t line = 0;
    std::size_t column = 0;
    std::string message;
};

/// Every distinct variable name appearing anywhere in the rule.
inline std::set<std::string> free_variables(const Rule& rule) {
    std::set<std::string> out;
    for (const auto* atoms : {&rule.body, &rule.head}) {
        for (const auto& atom : *atoms) {
            for (const auto& t : atom.args) {
                if (const auto* v = std::get_if<Variable>(&t)) out.insert(v->name);
            }
        }
    }
    return out;
}

inline std::string print_rule(const Rule& rule) {
    auto join = [](const std::vector<Atom>& atoms) {
        std::string out;
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            if (i) out += " ^ ";
            out += atoms[i].to_text();
        }
        return out;
    };
    return "rule " + rule.name + ": " + join(rule.body) + " -> " + join(rule.head);
}

inline std::string print_rules(const std::vector<Rule>& rules) {
    std::string out;
    for (const auto& r : rules) out += print_rule(r) + "\n";
    return out;
}

namespace detail {

enum class Tok { Ident, Number, String, Question, Colon, LParen, RParen, Comma, Caret, Arrow, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::size_t line = 1;
    std::size_t column = 1;
};

inline std::string_view tok_name(Tok t) {
    switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::String: return "string";
    case Tok::Question: return "'?'";
    case Tok::Colon: return "':'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::Caret: return "'^'";
    case Tok::Arrow: return "'->'";
    case Tok::End: return "end of input";
    }
    return "?";
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_blank();
            Token t;
            t.line = line_;
            t.column = col_;
            if (pos_ >= src_.size()) {
                out.push_back(t);
                return out;
            }
            char c = src_[pos_];
            if (text::is_ident_start(c)) {
                std::size_t start = pos_;
                while (pos_ < src_.size() && text::is_ident_char(src_[pos_])) advance();
                t.kind = Tok::Ident;
                t.text = std::string(src_.substr(start, pos_ - start));
            } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                       (c == '-' && peek_digit(1)) || (c == '.' && peek_digit(1))) {
                t.kind = Tok::Number;
                t.text = lex_number(t);
            } else if (c == '"') {
                t.kind = Tok::String;
                t.text = lex_string(t);
            } else if (c == '-' && peek(1) == '>') {
                advance();
                advance();
                t.kind = Tok::Arrow;
            } else if (starts_with("\xE2\x88\xA7")) { // ∧
                advance_bytes(3);
                t.kind = Tok::Caret;
            } else if (starts_with("\xE2\x86\x92")) { // →
                advance_bytes(3);
                t.kind = Tok::Arrow;
            } else {
                switch (c) {
                case '?': t.kind = Tok::Question; break;
                case ':': t.kind = Tok::Colon; break;
                case '(': t.kind = Tok::LParen; break;
                case ')': t.kind = Tok::RParen; break;
                case ',': t.kind = Tok::Comma; break;
                case '^': t.kind = Tok::Caret; break;
                default:
                    throw ParseError("unexpected character '" + std::string(1, c) + "'", line_, col_);
                }
                advance();
            }
            out.push_back(std::move(t));
        }
    }

private:
    char peek(std::size_t ahead) const { return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0'; }
    bool peek_digit(std::size_t ahead) const { return std::isdigit(static_cast<unsigned char>(peek(ahead))) != 0; }
    bool starts_with(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void advance_bytes(std::size_t n) {
        pos_ += n;
        ++col_;
    }

    void skip_blank() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else {
                return;
            }
        }
    }

    std::string lex_number(const Token& t) {
        std::size_t start = pos_;
        if (src_[pos_] == '-') advance();
        auto digits = [&] {
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
        };
        digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            advance();
            digits();
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            advance();
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) advance();
            digits();
        }
        std::string s(src_.substr(start, pos_ - start));
        if (!text::parse_double(s)) throw ParseError("malformed number '" + s + "'", t.line, t.column);
        if (pos_ < src_.size() && text::is_ident_char(src_[pos_])) {
            throw ParseError("malformed number '" + s + src_[pos_] + "...'", t.line, t.column);
        }
        return s;
    }

    std::string lex_string(const Token& t) {
        std::size_t start = pos_;
        advance();
        while (pos_ < src_.size() && src_[pos_] != '"') {
            if (src_[pos_] == '\n') break;
            if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) advance();
            advance();
        }
        if (pos_ >= src_.size() || src_[pos_] != '"') throw ParseError("unterminated string", t.line, t.column);
        advance();
        auto raw = src_.substr(start, pos_ - start);
        auto s = text::unquote(raw);
        if (!s) throw ParseError("bad escape in string", t.line, t.column);
        return *s;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

class RuleParser {
public:
    RuleParser(std::vector<Token> toks, std::vector<Diagnostic>* warnings)
        : toks_(std::move(toks)), warnings_(warnings) {}

    std::vector<Rule> run() {
        std::vector<Rule> rules;
        std::set<std::string> names;
        while (cur().kind != Tok::End) {
            const Token& kw = cur();
            if (kw.kind != Tok::Ident || kw.text != "rule") fail("expected 'rule'");
            Rule r;
            r.line = kw.line;
            ++i_;
            r.name = expect(Tok::Ident).text;
            if (!names.insert(r.name).second) {
                throw ParseError("duplicate rule name '" + r.name + "'", kw.line, kw.column);
            }
            expect(Tok::Colon);
            if (cur().kind == Tok::Arrow) fail("empty antecedent in rule '" + r.name + "'");
            r.body = atoms();
            expect(Tok::Arrow);
            if (cur().kind == Tok::End || (cur().kind == Tok::Ident && cur().text == "rule" &&
                                           peek(1).kind == Tok::Ident)) {
                fail("empty consequent in rule '" + r.name + "'");
            }
            r.head = atoms();
            check_rule(r, kw);
            rules.push_back(std::move(r));
        }
        return rules;
    }

private:
    const Token& cur() const { return toks_[i_]; }
    const Token& peek(std::size_t ahead) const { return toks_[std::min(i_ + ahead, toks_.size() - 1)]; }

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(what + " (found " + std::string(tok_name(cur().kind)) +
                             (cur().text.empty() ? "" : " '" + cur().text + "'") + ")",
                         cur().line, cur().column);
    }

    const Token& expect(Tok k) {
        if (cur().kind != k) fail("expected " + std::string(tok_name(k)));
        return toks_[i_++];
    }

    std::vector<Atom> atoms() {
        std::vector<Atom> out;
        out.push_back(atom());
        while (cur().kind == Tok::Caret) {
            ++i_;
            out.push_back(atom());
        }
        return out;
    }

    Atom atom() {
        const Token& first = expect(Tok::Ident);
        Atom a;
        if (cur().kind == Tok::Colon) {
            ++i_;
            a.kind = AtomKind::Builtin;
            a.ns = first.text;
            a.name = expect(Tok::Ident).text;
        } else {
            a.name = first.text;
        }
        expect(Tok::LParen);
        a.args.push_back(term());
        while (cur().kind == Tok::Comma) {
            ++i_;
            a.args.push_back(term());
        }
        expect(Tok::RParen);

        if (a.kind == AtomKind::Builtin) {
            if (a.ns == "swrlb" && a.name == "moreThan" && warnings_) {
                warnings_->push_back({first.line, first.column,
                                      "swrlb:moreThan is a non-standard alias of swrlb:greaterThan"});
            }
            return a;
        }
        if (a.name == kSameAs || a.name == kDifferentFrom) {
            a.kind = a.name == kSameAs ? AtomKind::SameAs : AtomKind::DifferentFrom;
            if (a.args.size() != 2) {
                throw ParseError("'" + a.name + "' takes exactly 2 arguments", first.line, first.column);
            }
            return a;
        }
        if (a.args.size() == 1) {
            a.kind = AtomKind::Class;
        } else if (a.args.size() == 2) {
            a.kind = AtomKind::Property;
        } else {
            throw ParseError("atom '" + a.name + "' has " + std::to_string(a.args.size()) +
                                 " arguments; class atoms take 1, property atoms 2 "
                                 "(use a namespaced built-in for other arities)",
                             first.line, first.column);
        }
        return a;
    }

    Term term() {
        const Token& t = cur();
        switch (t.kind) {
        case Tok::Question: {
            ++i_;
            return Variable{expect(Tok::Ident).text};
        }
        case Tok::Number: ++i_; return Literal::number(*text::parse_double(t.text));
        case Tok::String: ++i_; return Literal::text(t.text);
        case Tok::Ident:
            ++i_;
            if (t.text == "true") return Literal::boolean(true);
            if (t.text == "false") return Literal::boolean(false);
            return Individual{t.text};
        default: fail("expected a term");
        }
    }

    static void check_rule(const Rule& r, const Token& kw) {
        std::set<std::string> bound;
        for (const auto& a : r.body) {
            for (const auto& t : a.args) {
                if (const auto* v = std::get_if<Variable>(&t)) bound.insert(v->name);
            }
        }
        for (const auto& a : r.head) {
            if (a.kind == AtomKind::Builtin) {
                throw ParseError("built-in '" + a.qualified_name() + "' not allowed in the consequent of rule '" +
                                     r.name + "'",
                                 kw.line, kw.column);
            }
            for (const auto& t : a.args) {
                const auto* v = std::get_if<Variable>(&t);
                if (v && !bound.count(v->name)) {
                    throw ParseError("unsafe rule '" + r.name + "': head variable ?" + v->name +
                                         " does not occur in the antecedent",
                                     kw.line, kw.column);
                }
            }
        }
    }

    std::vector<Token> toks_;
    std::size_t i_ = 0;
    std::vector<Diagnostic>* warnings_;
};

} // namespace detail

/// Parses a rule file. Throws ParseError (with line/column) on syntax errors, built-ins in a
/// consequent, unsafe head variables and duplicate names. Non-fatal notes go to `warnings`.
inline std::vector<Rule> parse_rules(std::string_view src, std::vector<Diagnostic>* warnings = nullptr) {
    detail::Lexer lexer(src);
    detail::RuleParser parser(lexer.run(), warnings);
    return parser.run();
}

inline Rule parse_rule(std::string_view src) {
    auto rules = parse_rules(src);
    if (rules.size() != 1) throw ParseError("expected exactly one rule", 1);
    return rules.front();
}

} // namespace widop
