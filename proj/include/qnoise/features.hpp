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

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "qnoise/circuit.hpp"
#include "qnoise/errors.hpp"
#include "qnoise/gates.hpp"

namespace qnoise {

/// Token-grid bounds: 50 generated columns plus the measurement layer, and
/// the 10-qubit corpus ceiling.
inline constexpr int kGridDepth = 51;
inline constexpr int kGridQubits = 10;

/// Gate-count featurization: one count per schema gate, schema order fixed by
/// the vocabulary (minus any ablated names).
struct FeatureVector {
    std::vector<std::string> schema;
    std::vector<double> values;
};

/// Layered-column token grid, kGridDepth x kGridQubits, row-major; cell 0 is
/// padding/empty, other cells hold the 1-based vocabulary token.
struct TokenGrid {
    std::array<uint8_t, static_cast<size_t>(kGridDepth) * kGridQubits> tokens{};

    uint8_t at(int row, int qubit) const {
        return tokens[static_cast<size_t>(row) * kGridQubits + static_cast<size_t>(qubit)];
    }
    uint8_t& at(int row, int qubit) {
        return tokens[static_cast<size_t>(row) * kGridQubits + static_cast<size_t>(qubit)];
    }
};

/// The schema produced by dropping `ablate` names from the vocabulary order.
inline std::vector<std::string> feature_schema(const GateVocabulary& vocabulary,
                                               const std::set<std::string>& ablate = {}) {
    for (const std::string& name : ablate) {
        if (vocabulary.find(name) == nullptr) {
            throw std::invalid_argument("ablate: '" + name + "' is not in the vocabulary");
        }
    }
    std::vector<std::string> schema;
    schema.reserve(vocabulary.size());
    for (const GateKind& k : vocabulary.kinds()) {
        if (ablate.count(k.name) == 0) {
            schema.push_back(k.name);
        }
    }
    return schema;
}

/// Counts ops per schema gate. Ablated gates are dropped from the schema
/// entirely (their ops are neither counted nor an error).
inline FeatureVector featurize_counts(const Circuit& c, const GateVocabulary& vocabulary,
                                      const std::set<std::string>& ablate = {}) {
    FeatureVector fv;
    fv.schema = feature_schema(vocabulary, ablate);
    fv.values.assign(fv.schema.size(), 0.0);
    std::map<std::string, size_t> index;
    for (size_t j = 0; j < fv.schema.size(); ++j) {
        index[fv.schema[j]] = j;
    }
    for (const GateOp& op : c.ops) {
        const std::string name = gate_name(op.kind);
        if (vocabulary.find(name) == nullptr) {
            throw std::invalid_argument("featurize_counts: op '" + name +
                                        "' not in the vocabulary");
        }
        const auto it = index.find(name);
        if (it != index.end()) {
            fv.values[it->second] += 1.0;
        }
    }
    return fv;
}

/// Rebuilds a FeatureVector from a stored gate-count map (the dataset file's
/// gate_counts field). Missing schema names count 0; names outside the
/// vocabulary are rejected.
inline FeatureVector featurize_from_counts(const std::map<std::string, int>& counts,
                                           const GateVocabulary& vocabulary,
                                           const std::set<std::string>& ablate = {}) {
    for (const auto& [name, count] : counts) {
        if (vocabulary.find(name) == nullptr) {
            throw std::invalid_argument("gate_counts: '" + name + "' not in the vocabulary");
        }
        if (count < 0) {
            throw std::invalid_argument("gate_counts: negative count for '" + name + "'");
        }
    }
    FeatureVector fv;
    fv.schema = feature_schema(vocabulary, ablate);
    fv.values.assign(fv.schema.size(), 0.0);
    for (size_t j = 0; j < fv.schema.size(); ++j) {
        const auto it = counts.find(fv.schema[j]);
        if (it != counts.end()) {
            fv.values[j] = static_cast<double>(it->second);
        }
    }
    return fv;
}

/// Places each op at row = its layered column, writing the op's token into
/// the cell of every qubit it touches (both cells of a 2-qubit gate get the
/// same token). Cells no op touches stay 0.
inline TokenGrid tokenize_grid(const Circuit& c, const GateVocabulary& vocabulary) {
    if (c.num_qubits > kGridQubits) {
        throw CapacityError("tokenize_grid: circuit has " + std::to_string(c.num_qubits) +
                            " qubits; the grid holds at most " + std::to_string(kGridQubits));
    }
    const int depth = layered_depth(c);
    if (depth > kGridDepth) {
        throw CapacityError("tokenize_grid: circuit has layered depth " + std::to_string(depth) +
                            "; the grid holds at most " + std::to_string(kGridDepth));
    }
    const std::vector<int> columns = layered_columns(c);
    TokenGrid grid;
    for (size_t i = 0; i < c.ops.size(); ++i) {
        const GateOp& op = c.ops[i];
        const GateKind* kind = vocabulary.find(gate_name(op.kind));
        if (kind == nullptr) {
            throw std::invalid_argument(std::string("tokenize_grid: op '") + gate_name(op.kind) +
                                        "' not in the vocabulary");
        }
        const int row = columns[i];
        for (int a = 0; a < gate_arity(op.kind); ++a) {
            grid.at(row, op.qubits[static_cast<size_t>(a)]) =
                static_cast<uint8_t>(kind->token);
        }
    }
    return grid;
}

}  // namespace qnoise
