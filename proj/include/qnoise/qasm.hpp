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

#include <cctype>
#include <cstdlib>
#include <string>
#include <vector>

#include "qnoise/circuit.hpp"
#include "qnoise/errors.hpp"
#include "qnoise/gates.hpp"
#include "qnoise/text.hpp"

namespace qnoise {

namespace internal {

inline constexpr double kPi = 3.1415926535897932385;

/// Evaluates an angle expression: a radian literal, or a simple pi fraction
/// of the form [-] [k *] pi [/ m] with numeric k and m.
inline double eval_angle(const std::string& raw, int line, int column) {
    std::string s;
    for (char ch : raw) {
        if (!std::isspace(static_cast<unsigned char>(ch))) {
            s += ch;
        }
    }
    if (s.empty()) {
        throw ParseError(line, column, "empty angle expression");
    }
    double sign = 1.0;
    size_t pos = 0;
    if (s[0] == '-' || s[0] == '+') {
        sign = s[0] == '-' ? -1.0 : 1.0;
        pos = 1;
    }
    const std::string body = s.substr(pos);
    const size_t pi_at = body.find("pi");
    const auto parse_number = [&](const std::string& text) {
        char* end = nullptr;
        const double v = std::strtod(text.c_str(), &end);
        if (end != text.c_str() + text.size() || text.empty()) {
            throw ParseError(line, column, "cannot parse angle '" + raw + "'");
        }
        return v;
    };
    if (pi_at == std::string::npos) {
        return sign * parse_number(body);
    }
    double k = 1.0;
    if (pi_at > 0) {
        if (body[pi_at - 1] != '*') {
            throw ParseError(line, column, "cannot parse angle '" + raw + "'");
        }
        k = parse_number(body.substr(0, pi_at - 1));
    }
    double m = 1.0;
    const size_t rest = pi_at + 2;
    if (rest < body.size()) {
        if (body[rest] != '/') {
            throw ParseError(line, column, "cannot parse angle '" + raw + "'");
        }
        m = parse_number(body.substr(rest + 1));
        if (m == 0.0) {
            throw ParseError(line, column, "angle divides by zero");
        }
    }
    return sign * k * kPi / m;
}

/// Cursor over one statement, tracking the source line and the statement's
/// offset within it for error positions.
class StmtCursor {
public:
    StmtCursor(const std::string& text, int line, int base_column)
        : text_(text), line_(line), base_column_(base_column) {}

    void skip_spaces() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    bool done() {
        skip_spaces();
        return pos_ >= text_.size();
    }

    int column() const { return base_column_ + static_cast<int>(pos_); }
    int line() const { return line_; }

    std::string word() {
        skip_spaces();
        const size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        return text_.substr(start, pos_ - start);
    }

    bool try_consume(char ch) {
        skip_spaces();
        if (pos_ < text_.size() && text_[pos_] == ch) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char ch) {
        if (!try_consume(ch)) {
            throw ParseError(line_, column(), std::string("expected '") + ch + "'");
        }
    }

    bool try_consume_str(const std::string& s) {
        skip_spaces();
        if (text_.compare(pos_, s.size(), s) == 0) {
            pos_ += s.size();
            return true;
        }
        return false;
    }

    /// Everything left in the statement.
    std::string rest() {
        skip_spaces();
        const std::string out = text_.substr(pos_);
        pos_ = text_.size();
        return out;
    }

    /// Reads up to (not including) the next occurrence of `stop`.
    std::string until(char stop) {
        const size_t at = text_.find(stop, pos_);
        if (at == std::string::npos) {
            throw ParseError(line_, column(), std::string("expected '") + stop + "'");
        }
        const std::string out = text_.substr(pos_, at - pos_);
        pos_ = at;
        return out;
    }

    int integer() {
        skip_spaces();
        const size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
        if (pos_ == start) {
            throw ParseError(line_, column(), "expected an integer");
        }
        return std::atoi(text_.substr(start, pos_ - start).c_str());
    }

private:
    std::string text_;
    size_t pos_ = 0;
    int line_;
    int base_column_;
};

}  // namespace internal

/// Parses an OpenQASM 2.0 subset: header, optional includes, one qreg, one
/// creg, gate statements over the default vocabulary, `reset q[i]`, and
/// `measure q[i] -> c[j]` (the classical target index is checked for range
/// and otherwise ignored — bitstrings are keyed by qubit). Out-of-vocabulary
/// gates (u3 and friends) are rejected, not approximated.
inline Circuit parse_qasm(const std::string& text, const std::string& id = "") {
    Circuit c;
    c.id = id;
    bool saw_header = false;
    std::string qreg_name;
    std::string creg_name;
    int qreg_size = 0;
    int creg_size = 0;

    const auto parse_operand = [&](internal::StmtCursor& cur, const std::string& reg_name,
                                   int reg_size, const char* reg_kind) {
        const int col = cur.column();
        const std::string name = cur.word();
        if (name != reg_name || reg_name.empty()) {
            throw ParseError(cur.line(), col,
                             "unknown " + std::string(reg_kind) + " register '" + name + "'");
        }
        cur.expect('[');
        const int index = cur.integer();
        cur.expect(']');
        if (index >= reg_size) {
            throw ParseError(cur.line(), col,
                             "index " + std::to_string(index) + " exceeds " + reg_kind +
                                 " register size " + std::to_string(reg_size));
        }
        return index;
    };

    std::vector<std::string> lines = split_on(text, '\n');
    for (size_t li = 0; li < lines.size(); ++li) {
        const int line_no = static_cast<int>(li) + 1;
        std::string line = lines[li];
        const size_t comment = line.find("//");
        if (comment != std::string::npos) {
            line = line.substr(0, comment);
        }
        size_t offset = 0;
        while (offset < line.size()) {
            const size_t semi = line.find(';', offset);
            const std::string stmt_text =
                semi == std::string::npos ? line.substr(offset) : line.substr(offset, semi - offset);
            const int base_col = static_cast<int>(offset) + 1;
            offset = semi == std::string::npos ? line.size() : semi + 1;
            if (trim(stmt_text).empty()) {
                continue;
            }
            if (semi == std::string::npos) {
                throw ParseError(line_no, base_col + static_cast<int>(stmt_text.size()),
                                 "expected ';'");
            }
            internal::StmtCursor cur(stmt_text, line_no, base_col);
            if (!saw_header) {
                if (!cur.try_consume_str("OPENQASM")) {
                    throw ParseError(line_no, cur.column(), "expected OPENQASM 2.0 header");
                }
                const std::string version = trim(cur.rest());
                if (version != "2.0") {
                    throw ParseError(line_no, cur.column(),
                                     "unsupported OPENQASM version '" + version + "'");
                }
                saw_header = true;
                continue;
            }
            const int kw_col = cur.column();
            const std::string kw = cur.word();
            if (kw == "include") {
                continue;  // qelib1.inc declarations are built in
            }
            if (kw == "qreg" || kw == "creg") {
                const std::string name = cur.word();
                cur.expect('[');
                const int size = cur.integer();
                cur.expect(']');
                if (kw == "qreg") {
                    if (!qreg_name.empty()) {
                        throw ParseError(line_no, kw_col, "only one qreg is supported");
                    }
                    qreg_name = name;
                    qreg_size = size;
                } else {
                    if (!creg_name.empty()) {
                        throw ParseError(line_no, kw_col, "only one creg is supported");
                    }
                    creg_name = name;
                    creg_size = size;
                }
                continue;
            }
            if (kw == "measure") {
                const int q = parse_operand(cur, qreg_name, qreg_size, "quantum");
                cur.expect('-');
                cur.expect('>');
                parse_operand(cur, creg_name, creg_size, "classical");
                c.ops.emplace_back(Gate::Measure, q);
                continue;
            }
            if (kw == "reset") {
                const int q = parse_operand(cur, qreg_name, qreg_size, "quantum");
                c.ops.emplace_back(Gate::Reset, q);
                continue;
            }
            Gate g;
            try {
                g = gate_from_name(kw);
            } catch (const std::invalid_argument&) {
                throw UnsupportedGateError(kw, line_no);
            }
            GateOp op;
            op.kind = g;
            if (gate_param_count(g) == 1) {
                cur.expect('(');
                const int angle_col = cur.column();
                const std::string expr = cur.until(')');
                cur.expect(')');
                op.param = internal::eval_angle(expr, line_no, angle_col);
            }
            op.qubits[0] =
                static_cast<uint8_t>(parse_operand(cur, qreg_name, qreg_size, "quantum"));
            if (gate_arity(g) == 2) {
                cur.expect(',');
                op.qubits[1] =
                    static_cast<uint8_t>(parse_operand(cur, qreg_name, qreg_size, "quantum"));
            }
            if (!cur.done()) {
                throw ParseError(line_no, cur.column(), "trailing text after statement");
            }
            c.ops.push_back(op);
        }
    }
    if (!saw_header) {
        throw ParseError(1, 1, "missing OPENQASM 2.0 header");
    }
    if (qreg_name.empty()) {
        throw ParseError(1, 1, "missing qreg declaration");
    }
    c.num_qubits = qreg_size;
    try {
        validate_circuit(c);
    } catch (const std::invalid_argument& e) {
        throw ParseError(1, 1, e.what());
    }
    return c;
}

/// Emits the parseable subset; angles are written as radian literals with 17
/// significant digits, so parse_qasm(emit_qasm(c)) reproduces c exactly.
inline std::string emit_qasm(const Circuit& c) {
    std::string out = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[" +
                      std::to_string(c.num_qubits) + "];\ncreg c[" +
                      std::to_string(c.num_qubits) + "];\n";
    for (const GateOp& op : c.ops) {
        if (op.kind == Gate::Measure) {
            out += "measure q[" + std::to_string(op.qubits[0]) + "] -> c[" +
                   std::to_string(op.qubits[0]) + "];\n";
            continue;
        }
        if (op.kind == Gate::Reset) {
            out += "reset q[" + std::to_string(op.qubits[0]) + "];\n";
            continue;
        }
        out += gate_name(op.kind);
        if (gate_param_count(op.kind) == 1) {
            out += "(" + format_double17(op.param) + ")";
        }
        out += " q[" + std::to_string(op.qubits[0]) + "]";
        if (gate_arity(op.kind) == 2) {
            out += ",q[" + std::to_string(op.qubits[1]) + "]";
        }
        out += ";\n";
    }
    return out;
}

}  // namespace qnoise
