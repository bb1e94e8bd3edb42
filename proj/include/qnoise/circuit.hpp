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

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "qnoise/gates.hpp"

namespace qnoise {

/// Largest register the dense statevector simulator will accept.
inline constexpr int kMaxSimQubits = 24;

/// One gate application. `qubits[1]` is meaningful only for two-qubit gates;
/// for cx, qubits[0] is the control and qubits[1] the target.
struct GateOp {
    Gate kind = Gate::None;
    std::array<uint8_t, 2> qubits{0, 0};
    double param = 0.0;

    GateOp() = default;
    GateOp(Gate g, int q0) : kind(g), qubits{static_cast<uint8_t>(q0), 0} {}
    GateOp(Gate g, int q0, double p) : kind(g), qubits{static_cast<uint8_t>(q0), 0}, param(p) {}
    GateOp(Gate g, int q0, int q1)
        : kind(g), qubits{static_cast<uint8_t>(q0), static_cast<uint8_t>(q1)} {}

    bool operator==(const GateOp& other) const {
        return kind == other.kind && qubits == other.qubits && param == other.param;
    }
};

/// A flat, time-ordered gate sequence on `num_qubits` qubits.
struct Circuit {
    std::string id;
    int num_qubits = 0;
    std::vector<GateOp> ops;

    bool operator==(const Circuit& other) const {
        return id == other.id && num_qubits == other.num_qubits && ops == other.ops;
    }
};

/// Checks structural invariants; throws std::invalid_argument on violation.
///
/// Rules: 1 <= num_qubits <= kMaxSimQubits; every operand index is in range;
/// two-qubit gates touch two distinct qubits; rz carries a finite parameter;
/// no gate other than measure may act on a qubit after that qubit has been
/// measured.
inline void validate_circuit(const Circuit& c) {
    if (c.num_qubits < 1 || c.num_qubits > kMaxSimQubits) {
        throw std::invalid_argument("circuit '" + c.id + "': num_qubits " +
                                    std::to_string(c.num_qubits) + " outside 1.." +
                                    std::to_string(kMaxSimQubits));
    }
    std::vector<bool> measured(static_cast<size_t>(c.num_qubits), false);
    for (size_t i = 0; i < c.ops.size(); ++i) {
        const GateOp& op = c.ops[i];
        if (op.kind == Gate::None) {
            throw std::invalid_argument("circuit '" + c.id + "': op " + std::to_string(i) +
                                        " has no gate kind");
        }
        const int arity = gate_arity(op.kind);
        for (int a = 0; a < arity; ++a) {
            if (op.qubits[static_cast<size_t>(a)] >= c.num_qubits) {
                throw std::invalid_argument(
                    "circuit '" + c.id + "': op " + std::to_string(i) + " (" +
                    gate_name(op.kind) + ") touches qubit " +
                    std::to_string(op.qubits[static_cast<size_t>(a)]) + " but register has " +
                    std::to_string(c.num_qubits));
            }
        }
        if (arity == 2 && op.qubits[0] == op.qubits[1]) {
            throw std::invalid_argument("circuit '" + c.id + "': op " + std::to_string(i) + " (" +
                                        gate_name(op.kind) + ") repeats qubit " +
                                        std::to_string(op.qubits[0]));
        }
        if (gate_param_count(op.kind) == 1 && !std::isfinite(op.param)) {
            throw std::invalid_argument("circuit '" + c.id + "': op " + std::to_string(i) +
                                        " (rz) has non-finite angle");
        }
        for (int a = 0; a < arity; ++a) {
            if (measured[op.qubits[static_cast<size_t>(a)]] && op.kind != Gate::Measure) {
                throw std::invalid_argument("circuit '" + c.id + "': op " + std::to_string(i) +
                                            " (" + gate_name(op.kind) + ") acts on qubit " +
                                            std::to_string(op.qubits[static_cast<size_t>(a)]) +
                                            " after it was measured");
            }
        }
        if (op.kind == Gate::Measure) {
            measured[op.qubits[0]] = true;
        }
    }
}

/// Assigns each op to the earliest column in which all of its operands are
/// free: column(op) = 1 + max over operands of that qubit's frontier, where
/// every qubit's frontier starts at -1 and advances to the assigned column.
/// Returns one column index per op, in op order.
inline std::vector<int> layered_columns(const Circuit& c) {
    std::vector<int> frontier(static_cast<size_t>(c.num_qubits), -1);
    std::vector<int> columns;
    columns.reserve(c.ops.size());
    for (const GateOp& op : c.ops) {
        const int arity = gate_arity(op.kind);
        int col = 0;
        for (int a = 0; a < arity; ++a) {
            col = std::max(col, frontier[op.qubits[static_cast<size_t>(a)]] + 1);
        }
        for (int a = 0; a < arity; ++a) {
            frontier[op.qubits[static_cast<size_t>(a)]] = col;
        }
        columns.push_back(col);
    }
    return columns;
}

/// Number of columns when ops are packed greedily to the left: zero for an
/// empty circuit, otherwise 1 + max(layered_columns).
inline int layered_depth(const Circuit& c) {
    int depth = 0;
    std::vector<int> frontier(static_cast<size_t>(c.num_qubits), -1);
    for (const GateOp& op : c.ops) {
        const int arity = gate_arity(op.kind);
        int col = 0;
        for (int a = 0; a < arity; ++a) {
            col = std::max(col, frontier[op.qubits[static_cast<size_t>(a)]] + 1);
        }
        for (int a = 0; a < arity; ++a) {
            frontier[op.qubits[static_cast<size_t>(a)]] = col;
        }
        depth = std::max(depth, col + 1);
    }
    return depth;
}

/// Counts ops per gate name, including zero entries for every vocabulary
/// gate, keyed by gate name.
inline std::map<std::string, int> gate_counts(const Circuit& c) {
    std::map<std::string, int> counts;
    for (const GateKind& k : default_vocabulary().kinds()) {
        counts[k.name] = 0;
    }
    for (const GateOp& op : c.ops) {
        ++counts[gate_name(op.kind)];
    }
    return counts;
}

}  // namespace qnoise
