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

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qnoise/circuit.hpp"
#include "qnoise/errors.hpp"
#include "qnoise/gates.hpp"
#include "qnoise/text.hpp"

namespace qnoise {

/// One JSON line per circuit:
///   {"id": str, "num_qubits": int, "ops": [{"g": name, "q": [ints], "p": [floats]}...]}
/// Emission is hand-rolled (fixed key order, 17-significant-digit angles) so
/// identical circuits always serialize to identical bytes.
inline std::string serialize_circuit(const Circuit& c) {
    std::string out = "{\"id\":\"" + json_escape(c.id) +
                      "\",\"num_qubits\":" + std::to_string(c.num_qubits) + ",\"ops\":[";
    for (size_t i = 0; i < c.ops.size(); ++i) {
        const GateOp& op = c.ops[i];
        if (i > 0) {
            out += ',';
        }
        out += "{\"g\":\"";
        out += gate_name(op.kind);
        out += "\",\"q\":[";
        out += std::to_string(op.qubits[0]);
        if (gate_arity(op.kind) == 2) {
            out += ',';
            out += std::to_string(op.qubits[1]);
        }
        out += "],\"p\":[";
        if (gate_param_count(op.kind) == 1) {
            out += format_double17(op.param);
        }
        out += "]}";
    }
    out += "]}";
    return out;
}

/// Parses one serialized circuit line. `line_number` (1-based) is only used
/// to locate errors.
inline Circuit deserialize_circuit(const std::string& line, int line_number = 1) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(line_number, 0, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j.contains("num_qubits") || !j.contains("ops")) {
        throw ParseError(line_number, 0, "circuit object needs keys id, num_qubits, ops");
    }
    Circuit c;
    try {
        c.id = j.at("id").get<std::string>();
        c.num_qubits = j.at("num_qubits").get<int>();
        for (const nlohmann::json& jop : j.at("ops")) {
            if (!jop.contains("g") || !jop.contains("q")) {
                throw ParseError(line_number, 0, "op needs keys g and q");
            }
            GateOp op;
            const std::string name = jop.at("g").get<std::string>();
            try {
                op.kind = gate_from_name(name);
            } catch (const std::invalid_argument&) {
                throw UnsupportedGateError(name, line_number);
            }
            const std::vector<int> qubits = jop.at("q").get<std::vector<int>>();
            if (qubits.size() != static_cast<size_t>(gate_arity(op.kind))) {
                throw ParseError(line_number, 0,
                                 "op '" + name + "' expects " +
                                     std::to_string(gate_arity(op.kind)) + " qubit(s), got " +
                                     std::to_string(qubits.size()));
            }
            for (size_t a = 0; a < qubits.size(); ++a) {
                if (qubits[a] < 0 || qubits[a] > 255) {
                    throw ParseError(line_number, 0, "qubit index out of range");
                }
                op.qubits[a] = static_cast<uint8_t>(qubits[a]);
            }
            const std::vector<double> params =
                jop.contains("p") ? jop.at("p").get<std::vector<double>>()
                                  : std::vector<double>{};
            if (params.size() != static_cast<size_t>(gate_param_count(op.kind))) {
                throw ParseError(line_number, 0,
                                 "op '" + name + "' expects " +
                                     std::to_string(gate_param_count(op.kind)) +
                                     " parameter(s), got " + std::to_string(params.size()));
            }
            if (!params.empty()) {
                op.param = params[0];
            }
            c.ops.push_back(op);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(line_number, 0, std::string("bad field type: ") + e.what());
    }
    try {
        validate_circuit(c);
    } catch (const std::invalid_argument& e) {
        throw ParseError(line_number, 0, e.what());
    }
    return c;
}

/// Writes circuits as JSON Lines.
inline void write_circuits(std::ostream& out, const std::vector<Circuit>& circuits) {
    for (const Circuit& c : circuits) {
        out << serialize_circuit(c) << '\n';
    }
}

/// Reads a JSON Lines circuit stream; blank lines are skipped.
inline std::vector<Circuit> read_circuits(std::istream& in) {
    std::vector<Circuit> circuits;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (trim(line).empty()) {
            continue;
        }
        circuits.push_back(deserialize_circuit(line, line_number));
    }
    return circuits;
}

}  // namespace qnoise
