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

#include "qnoise/dataset.hpp"
#include "qnoise/errors.hpp"
#include "qnoise/text.hpp"

namespace qnoise {

/// One JSON line per record, keys in fixed order; the label uses 17
/// significant digits so a reload is bit-exact. gate_counts keys are sorted
/// (std::map order), making reruns byte-identical.
inline std::string serialize_record(const LabeledRecord& r) {
    std::string out = "{\"circuit_id\":\"" + json_escape(r.circuit_id) +
                      "\",\"num_qubits\":" + std::to_string(r.num_qubits) +
                      ",\"depth\":" + std::to_string(r.depth) + ",\"gate_counts\":{";
    bool first = true;
    for (const auto& [name, count] : r.gate_counts) {
        if (!first) {
            out += ',';
        }
        first = false;
        out += '"' + json_escape(name) + "\":" + std::to_string(count);
    }
    out += "},\"label\":" + format_double17(r.label) + ",\"preset\":\"" + json_escape(r.preset) +
           "\",\"shots\":" + std::to_string(r.shots) + "}";
    return out;
}

inline LabeledRecord deserialize_record(const std::string& line, int line_number = 1) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(line_number, 0, std::string("invalid JSON: ") + e.what());
    }
    LabeledRecord r;
    try {
        for (const char* key :
             {"circuit_id", "num_qubits", "depth", "gate_counts", "label", "preset", "shots"}) {
            if (!j.contains(key)) {
                throw ParseError(line_number, 0, std::string("record missing key ") + key);
            }
        }
        r.circuit_id = j.at("circuit_id").get<std::string>();
        r.num_qubits = j.at("num_qubits").get<int>();
        r.depth = j.at("depth").get<int>();
        for (const auto& [name, count] : j.at("gate_counts").items()) {
            r.gate_counts[name] = count.get<int>();
        }
        r.label = j.at("label").get<double>();
        r.preset = j.at("preset").get<std::string>();
        r.shots = j.at("shots").get<uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(line_number, 0, std::string("bad field type: ") + e.what());
    }
    if (!(r.label >= 0.0 && r.label <= 1.0)) {
        throw ParseError(line_number, 0,
                         "label " + format_double17(r.label) + " outside [0, 1]");
    }
    return r;
}

inline void write_records(std::ostream& out, const std::vector<LabeledRecord>& records) {
    for (const LabeledRecord& r : records) {
        out << serialize_record(r) << '\n';
    }
}

inline std::vector<LabeledRecord> read_records(std::istream& in) {
    std::vector<LabeledRecord> records;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (trim(line).empty()) {
            continue;
        }
        records.push_back(deserialize_record(line, line_number));
    }
    return records;
}

}  // namespace qnoise
