// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The widop Authors

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "widop/kb.hpp"
#include "widop/text.hpp"

// Line-oriented knowledge-base format. One record per line, TAB-separated, '#' comments:
//
//   C  name  parent|-
//   P  name  object|data
//   A  class ind concept
//   A  obj   subj prop target
//   A  data  subj prop literal
//   G  ind   box|line|plane  <space-separated numbers>
//
// Records are emitted in dependency order (concepts parents-first, then properties,
// assertions, attachments) so a reader can apply them one by one.

namespace widop {

inline constexpr std::string_view kKbHeader = "# widop knowledge base v1";

namespace detail {

inline std::string join_numbers(std::initializer_list<double> values) {
    std::string out;
    for (double v : values) {
        if (!out.empty()) out += ' ';
        out += text::format_double(v);
    }
    return out;
}

inline std::vector<double> parse_numbers(std::string_view field, std::size_t expected, std::size_t line) {
    std::vector<double> out;
    for (auto tok : text::split_ws(field)) {
        auto v = text::parse_double(tok);
        if (!v) throw ParseError("bad number '" + std::string(tok) + "'", line);
        out.push_back(*v);
    }
    if (out.size() != expected) {
        throw ParseError("expected " + std::to_string(expected) + " numbers, got " + std::to_string(out.size()), line);
    }
    return out;
}

inline std::size_t as_count(double v, std::size_t line) {
    if (v < 0 || v != std::floor(v)) throw ParseError("inlier count must be a non-negative integer", line);
    return static_cast<std::size_t>(v);
}

} // namespace detail

inline std::string serialize(const KnowledgeBase& kb) {
    std::string out(kKbHeader);
    out += '\n';

    std::vector<std::pair<std::size_t, std::string>> order;
    for (const auto& [name, parent] : kb.concepts()) order.emplace_back(kb.depth(name), name);
    std::sort(order.begin(), order.end());
    for (const auto& [d, name] : order) {
        auto parent = kb.parent_of(name);
        out += "C\t" + name + "\t" + (parent ? *parent : std::string("-")) + "\n";
    }
    for (const auto& [name, kind] : kb.properties()) {
        out += "P\t" + name + "\t" + std::string(to_string(kind)) + "\n";
    }
    for (const auto& a : kb.assertions()) {
        switch (a.kind) {
        case AssertionKind::Class: out += "A\tclass\t" + a.subject + "\t" + a.predicate + "\n"; break;
        case AssertionKind::Object:
            out += "A\tobj\t" + a.subject + "\t" + a.predicate + "\t" + node_text(*a.object) + "\n";
            break;
        case AssertionKind::Data:
            out += "A\tdata\t" + a.subject + "\t" + a.predicate + "\t" + node_text(*a.object) + "\n";
            break;
        }
    }
    for (const auto& [id, rec] : kb.geometries()) {
        if (rec.box) {
            const auto& b = *rec.box;
            out += "G\t" + id + "\tbox\t" +
                   detail::join_numbers({b.min.x, b.min.y, b.min.z, b.max.x, b.max.y, b.max.z}) + "\n";
        }
        for (const auto& l : rec.lines) {
            out += "G\t" + id + "\tline\t" +
                   detail::join_numbers({l.anchor.x, l.anchor.y, l.anchor.z, l.direction.x, l.direction.y,
                                         l.direction.z, static_cast<double>(l.inliers), l.extent_min,
                                         l.extent_max}) +
                   "\n";
        }
        for (const auto& p : rec.planes) {
            out += "G\t" + id + "\tplane\t" +
                   detail::join_numbers(
                       {p.normal.x, p.normal.y, p.normal.z, p.offset, static_cast<double>(p.inliers)}) +
                   "\n";
        }
    }
    return out;
}

/// Applies the records of `text` to `kb` (which may already hold declarations).
inline void deserialize_into(KnowledgeBase& kb, std::string_view text) {
    std::size_t lineno = 0;
    for (auto raw : text::lines(text)) {
        ++lineno;
        std::string_view line = raw;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (text::trim(line).empty() || line.front() == '#') continue;
        auto f = text::split(line, '\t');
        auto need = [&](std::size_t n) {
            if (f.size() != n) {
                throw ParseError("record '" + std::string(f[0]) + "' expects " + std::to_string(n) +
                                     " TAB-separated fields, got " + std::to_string(f.size()),
                                 lineno);
            }
        };
        try {
            if (f[0] == "C") {
                need(3);
                std::optional<std::string> parent;
                if (f[2] != "-") parent = std::string(f[2]);
                kb.declare_concept(std::string(f[1]), parent);
            } else if (f[0] == "P") {
                need(3);
                if (f[2] == "object") kb.declare_property(std::string(f[1]), PropertyKind::Object);
                else if (f[2] == "data") kb.declare_property(std::string(f[1]), PropertyKind::Data);
                else throw ParseError("property kind must be 'object' or 'data'", lineno);
            } else if (f[0] == "A") {
                if (f.size() < 2) need(4);
                if (f[1] == "class") {
                    need(4);
                    kb.assert_class(std::string(f[2]), std::string(f[3]));
                } else if (f[1] == "obj") {
                    need(5);
                    kb.assert_object(std::string(f[2]), std::string(f[3]), std::string(f[4]));
                } else if (f[1] == "data") {
                    need(5);
                    auto lit = Literal::parse(f[4]);
                    if (!lit) throw ParseError("bad literal '" + std::string(f[4]) + "'", lineno);
                    kb.assert_data(std::string(f[2]), std::string(f[3]), *lit);
                } else {
                    throw ParseError("assertion kind must be class, obj or data", lineno);
                }
            } else if (f[0] == "G") {
                need(4);
                std::string id(f[1]);
                if (f[2] == "box") {
                    auto v = detail::parse_numbers(f[3], 6, lineno);
                    kb.attach_box(id, Box3({v[0], v[1], v[2]}, {v[3], v[4], v[5]}));
                } else if (f[2] == "line") {
                    auto v = detail::parse_numbers(f[3], 9, lineno);
                    kb.attach_line(id, Line3{{v[0], v[1], v[2]}, {v[3], v[4], v[5]}, detail::as_count(v[6], lineno),
                                             v[7], v[8]});
                } else if (f[2] == "plane") {
                    auto v = detail::parse_numbers(f[3], 5, lineno);
                    kb.attach_plane(id, Plane3{{v[0], v[1], v[2]}, v[3], detail::as_count(v[4], lineno)});
                } else {
                    throw ParseError("geometry kind must be box, line or plane", lineno);
                }
            } else {
                throw ParseError("unknown record type '" + std::string(f[0]) + "'", lineno);
            }
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(e.what(), lineno);
        }
    }
}

inline KnowledgeBase deserialize(std::string_view text) {
    KnowledgeBase kb;
    deserialize_into(kb, text);
    return kb;
}

inline KnowledgeBase load_kb(const std::string& path) { return deserialize(text::read_file(path)); }

inline void save_kb(const KnowledgeBase& kb, const std::string& path) { text::write_file(path, serialize(kb)); }

} // namespace widop
