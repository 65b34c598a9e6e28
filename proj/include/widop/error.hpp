// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The widop Authors

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace widop {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed textual input (knowledge base, rules, point cloud, config).
/// Line and column are 1-based; 0 means unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column = 0)
        : Error(format(what, line, column)), line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    static std::string format(const std::string& what, std::size_t line, std::size_t column) {
        std::string out = "line " + std::to_string(line);
        if (column != 0) out += ", column " + std::to_string(column);
        return out + ": " + what;
    }

    std::size_t line_;
    std::size_t column_;
};

/// Violation of the knowledge-base schema (undeclared names, kind mismatch, cycles).
class KbError : public Error {
public:
    using Error::Error;
};

/// Rule-engine failure: unknown atom, unsatisfiable built-in ordering, iteration cap.
class EngineError : public Error {
public:
    using Error::Error;
};

/// Planner failure: successor cycle or an input kind nobody produces.
class PlanError : public Error {
public:
    using Error::Error;
};

/// Invalid arguments to a geometry routine (e.g. bounding box of nothing).
class GeometryError : public Error {
public:
    using Error::Error;
};

} // namespace widop
