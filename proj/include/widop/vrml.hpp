// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The widop Authors

#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "widop/error.hpp"
#include "widop/evaluation.hpp"
#include "widop/kb.hpp"
#include "widop/text.hpp"

namespace widop {

inline constexpr std::string_view kVrmlHeader = "#VRML V2.0 utf8";

using Rgb = std::array<double, 3>;

struct ColorMap {
    std::map<std::string, Rgb> colors;
    Rgb fallback{0.6, 0.6, 0.6};
};

inline ColorMap default_colormap() {
    ColorMap m;
    m.colors = {
        {"BigMast", {0.85, 0.10, 0.10}},        {"NormalMast", {0.95, 0.55, 0.10}},
        {"Mast", {0.60, 0.20, 0.10}},           {"MainSignal", {0.10, 0.35, 0.90}},
        {"DistantSignal", {0.10, 0.75, 0.95}},  {"BasicSignals", {0.25, 0.45, 0.75}},
        {"Vorsignalbake", {0.55, 0.20, 0.85}},  {"Breakpoint_table", {0.85, 0.30, 0.70}},
        {"Chess_board", {0.35, 0.10, 0.45}},    {"SecondarySignal", {0.60, 0.45, 0.75}},
        {"Signals", {0.30, 0.30, 0.60}},        {"Schalthaus", {0.10, 0.70, 0.20}},
        {"SchaltSchrank", {0.60, 0.90, 0.20}},  {"Schaltanlage", {0.20, 0.50, 0.20}},
    };
    return m;
}

/// `Class=r g b` lines ('#' comments); the key `default` sets the fallback color.
inline ColorMap parse_colormap(std::string_view content) {
    ColorMap m;
    std::size_t lineno = 0;
    for (auto raw : text::lines(content)) {
        ++lineno;
        auto line = text::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError("expected Class=r g b", lineno);
        std::string key(text::trim(line.substr(0, eq)));
        auto f = text::split_ws(line.substr(eq + 1));
        if (f.size() != 3) throw ParseError("color needs three components", lineno);
        Rgb c{};
        for (std::size_t i = 0; i < 3; ++i) {
            auto v = text::parse_double(f[i]);
            if (!v || *v < 0.0 || *v > 1.0) throw ParseError("color component must lie in [0, 1]", lineno);
            c[i] = *v;
        }
        if (key == "default") m.fallback = c;
        else if (text::is_identifier(key)) m.colors[key] = c;
        else throw ParseError("bad class name '" + key + "'", lineno);
    }
    return m;
}

inline std::string format_colormap(const ColorMap& m) {
    auto rgb = [](const Rgb& c) {
        return text::format_double(c[0]) + " " + text::format_double(c[1]) + " " + text::format_double(c[2]);
    };
    std::string out = "default=" + rgb(m.fallback) + "\n";
    for (const auto& [k, c] : m.colors) out += k + "=" + rgb(c) + "\n";
    return out;
}

/// Deepest asserted domain class of `id`; equal depths resolve to the smallest name and
/// add a warning.
inline std::optional<std::string> most_specific_class(const KnowledgeBase& kb, const std::string& id,
                                                      std::vector<std::string>* warnings = nullptr) {
    auto cls = classes_under(kb, id, kDomainRoot);
    if (cls.empty()) return std::nullopt;
    std::size_t best_depth = 0;
    std::vector<std::string> best;
    for (const auto& c : cls) {
        auto d = kb.depth(c);
        if (best.empty() || d > best_depth) {
            best = {c};
            best_depth = d;
        } else if (d == best_depth) {
            best.push_back(c);
        }
    }
    std::sort(best.begin(), best.end());
    if (best.size() > 1 && warnings) {
        std::string all;
        for (const auto& c : best) all += (all.empty() ? "" : ", ") + c;
        warnings->push_back("'" + id + "' has equally specific classes {" + all + "}; using " + best.front());
    }
    return best.front();
}

inline Rgb color_for(const KnowledgeBase& kb, const ColorMap& m, const std::optional<std::string>& cls) {
    if (!cls) return m.fallback;
    for (const auto& c : kb.ancestors(*cls)) {
        auto it = m.colors.find(c);
        if (it != m.colors.end()) return it->second;
    }
    return m.fallback;
}

/// One box node per boxed individual, in id order, colored by its most specific class.
inline std::string export_vrml(const KnowledgeBase& kb, const ColorMap& colors = default_colormap(),
                               std::vector<std::string>* warnings = nullptr) {
    auto triple = [](double a, double b, double c) {
        return text::format_double(a) + " " + text::format_double(b) + " " + text::format_double(c);
    };
    std::string out(kVrmlHeader);
    out += "\n";
    for (const auto& id : kb.boxed_individuals()) {
        const Box3& b = *kb.geometry(id)->box;
        auto cls = most_specific_class(kb, id, warnings);
        Rgb c = color_for(kb, colors, cls);
        Vec3 mid = b.centroid();
        Vec3 ext = b.extents();
        out += "# " + id + (cls ? " " + *cls : std::string()) + "\n";
        out += "DEF " + id + " Transform {\n";
        out += "  translation " + triple(mid.x, mid.y, mid.z) + "\n";
        out += "  children [\n";
        out += "    Shape {\n";
        out += "      appearance Appearance {\n";
        out += "        material Material { diffuseColor " + triple(c[0], c[1], c[2]) + " }\n";
        out += "      }\n";
        out += "      geometry Box { size " + triple(ext.x, ext.y, ext.z) + " }\n";
        out += "    }\n";
        out += "  ]\n";
        out += "}\n";
    }
    return out;
}

struct VrmlDiagnostic {
    std::size_t line = 0;
    std::string message;
};

/// Structural checks: header, balanced braces and brackets, and numeric fields of the
/// node types the exporter writes. Returns an empty list for a valid document.
inline std::vector<VrmlDiagnostic> validate_vrml(std::string_view doc) {
    std::vector<VrmlDiagnostic> diags;
    auto first_nl = doc.find('\n');
    std::string_view header = doc.substr(0, first_nl == std::string_view::npos ? doc.size() : first_nl);
    if (!header.empty() && header.back() == '\r') header.remove_suffix(1);
    if (text::trim(header) != kVrmlHeader) diags.push_back({1, "missing '#VRML V2.0 utf8' header"});

    struct Token {
        std::string_view text;
        std::size_t line;
    };
    std::vector<Token> tokens;
    std::size_t line = 1;
    std::size_t i = first_nl == std::string_view::npos ? doc.size() : first_nl;
    while (i < doc.size()) {
        char c = doc[i];
        if (c == '\n') {
            ++line;
            ++i;
        } else if (c == '#') {
            while (i < doc.size() && doc[i] != '\n') ++i;
        } else if (c == ' ' || c == '\t' || c == '\r' || c == ',') {
            ++i;
        } else if (c == '"') {
            std::size_t start = i++, at = line;
            while (i < doc.size() && doc[i] != '"') {
                if (doc[i] == '\\' && i + 1 < doc.size()) ++i;
                if (doc[i] == '\n') ++line;
                ++i;
            }
            if (i >= doc.size()) {
                diags.push_back({at, "unterminated string"});
            } else {
                ++i;
            }
            tokens.push_back({doc.substr(start, i - start), at});
        } else if (c == '{' || c == '}' || c == '[' || c == ']') {
            tokens.push_back({doc.substr(i, 1), line});
            ++i;
        } else {
            std::size_t start = i;
            while (i < doc.size() && std::string_view(" \t\r\n,{}[]#\"").find(doc[i]) == std::string_view::npos) ++i;
            tokens.push_back({doc.substr(start, i - start), line});
        }
    }

    std::vector<Token> open;
    const std::map<std::string_view, std::size_t> numeric_fields = {
        {"translation", 3}, {"size", 3}, {"diffuseColor", 3}, {"scale", 3}, {"rotation", 4}, {"center", 3}};
    for (std::size_t k = 0; k < tokens.size(); ++k) {
        const auto& t = tokens[k];
        if (t.text == "{" || t.text == "[") {
            open.push_back(t);
            continue;
        }
        if (t.text == "}" || t.text == "]") {
            char want = t.text == "}" ? '{' : '[';
            if (open.empty()) {
                diags.push_back({t.line, "unmatched '" + std::string(t.text) + "'"});
            } else if (open.back().text.front() != want) {
                diags.push_back({t.line, "'" + std::string(t.text) + "' closes '" + std::string(open.back().text) +
                                             "' opened on line " + std::to_string(open.back().line)});
                open.pop_back();
            } else {
                open.pop_back();
            }
            continue;
        }
        auto field = numeric_fields.find(t.text);
        if (field == numeric_fields.end()) {
            char c0 = t.text.front();
            bool looks_numeric = (c0 >= '0' && c0 <= '9') || c0 == '-' || c0 == '+' || c0 == '.';
            if (looks_numeric && !text::parse_double(t.text)) {
                diags.push_back({t.line, "malformed number '" + std::string(t.text) + "'"});
            }
            continue;
        }
        for (std::size_t n = 0; n < field->second; ++n) {
            if (k + 1 >= tokens.size()) {
                diags.push_back({t.line, std::string(t.text) + " expects " + std::to_string(field->second) + " numbers"});
                break;
            }
            const auto& v = tokens[k + 1];
            auto d = text::parse_double(v.text);
            if (!d) {
                diags.push_back({v.line, std::string(t.text) + " expects " + std::to_string(field->second) +
                                             " numbers, got '" + std::string(v.text) + "'"});
                break;
            }
            ++k;
            if (t.text == "size" && *d < 0) diags.push_back({v.line, "negative box size"});
            if (t.text == "diffuseColor" && (*d < 0 || *d > 1)) diags.push_back({v.line, "color component outside [0, 1]"});
        }
    }
    for (const auto& t : open) diags.push_back({t.line, "'" + std::string(t.text) + "' is never closed"});
    return diags;
}

} // namespace widop
