// Copyright 2026 The qnoise Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qnoise {

/// Malformed textual input (QASM, JSON lines, CSV). Line/column are 1-based;
/// 0 means unknown.
class ParseError : public std::runtime_error {
public:
    ParseError(size_t line, size_t column, const std::string& message)
        : std::runtime_error(format(message, line, column)), line_(line), column_(column) {}

    size_t line() const noexcept { return line_; }
    size_t column() const noexcept { return column_; }

private:
    static std::string format(const std::string& message, size_t line, size_t column) {
        if (line == 0) {
            return message;
        }
        std::string out = "line " + std::to_string(line);
        if (column != 0) {
            out += ", column " + std::to_string(column);
        }
        return out + ": " + message;
    }

    size_t line_;
    size_t column_;
};

/// A gate name outside the supported vocabulary was encountered during parsing.
class UnsupportedGateError : public ParseError {
public:
    UnsupportedGateError(const std::string& gate, size_t line = 0, size_t column = 0)
        : ParseError(line, column, "unsupported gate '" + gate + "'"), gate_(gate) {}

    const std::string& gate() const noexcept { return gate_; }

private:
    std::string gate_;
};

/// Input exceeds a hard structural bound (simulator qubit limit, grid shape).
class CapacityError : public std::runtime_error {
public:
    explicit CapacityError(const std::string& message) : std::runtime_error(message) {}
};

/// A numeric procedure failed (singular normal equations, non-finite
/// gradients). Distinct from data errors so the CLI can report it as such.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& message) : std::runtime_error(message) {}
};

}  // namespace qnoise
