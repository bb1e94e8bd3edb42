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

#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "qnoise/circuit_io.hpp"
#include "qnoise/dataset_io.hpp"
#include "qnoise/errors.hpp"
#include "qnoise/features.hpp"
#include "qnoise/generate.hpp"
#include "qnoise/matrix.hpp"
#include "qnoise/model_io.hpp"

namespace {

using qnoise::Circuit;
using qnoise::LabeledRecord;
using qnoise::Matrix;
using qnoise::ModelFile;
using qnoise::ParseError;

TEST_CASE("circuit serialization is byte-stable and reversible", "[io]") {
    const Circuit c = qnoise::random_circuit(5, 12, 99);
    const std::string line = qnoise::serialize_circuit(c);
    CHECK(line == qnoise::serialize_circuit(c));
    const Circuit back = qnoise::deserialize_circuit(line);
    CHECK(back == c);
}

TEST_CASE("circuit stream round trip preserves order", "[io]") {
    qnoise::CorpusSpec spec;
    spec.per_qubit_count = 5;
    spec.qubit_lo = 3;
    spec.qubit_hi = 4;
    const std::vector<Circuit> circuits = qnoise::generate_corpus(spec);
    std::stringstream buffer;
    qnoise::write_circuits(buffer, circuits);
    const std::vector<Circuit> back = qnoise::read_circuits(buffer);
    REQUIRE(back.size() == circuits.size());
    for (size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i] == circuits[i]);
    }
}

TEST_CASE("circuit parse errors", "[io]") {
    CHECK_THROWS_AS(qnoise::deserialize_circuit("{not json"), ParseError);
    CHECK_THROWS_AS(qnoise::deserialize_circuit("{\"id\":\"a\"}"), ParseError);
    CHECK_THROWS_AS(
        qnoise::deserialize_circuit(
            R"({"id":"a","num_qubits":1,"ops":[{"g":"ccx","q":[0]}]})"),
        qnoise::UnsupportedGateError);
    CHECK_THROWS_AS(
        qnoise::deserialize_circuit(
            R"({"id":"a","num_qubits":1,"ops":[{"g":"cx","q":[0]}]})"),
        ParseError);  // arity mismatch
    CHECK_THROWS_AS(
        qnoise::deserialize_circuit(
            R"({"id":"a","num_qubits":1,"ops":[{"g":"rz","q":[0],"p":[]}]})"),
        ParseError);  // missing angle
    CHECK_THROWS_AS(
        qnoise::deserialize_circuit(
            R"({"id":"a","num_qubits":2,"ops":[{"g":"x","q":[5],"p":[]}]})"),
        ParseError);  // operand outside the register
}

TEST_CASE("blank lines are skipped when reading circuits", "[io]") {
    const Circuit c = qnoise::random_circuit(3, 4, 1);
    std::stringstream buffer;
    buffer << "\n" << qnoise::serialize_circuit(c) << "\n\n";
    const std::vector<Circuit> back = qnoise::read_circuits(buffer);
    REQUIRE(back.size() == 1);
    CHECK(back[0] == c);
}

LabeledRecord sample_record() {
    LabeledRecord r;
    r.circuit_id = "q4-00042";
    r.num_qubits = 4;
    r.depth = 13;
    r.gate_counts = {{"x", 3}, {"cx", 2}, {"measure", 4}};
    r.label = 0.125;
    r.preset = "preset-a";
    r.shots = 1000;
    return r;
}

TEST_CASE("record serialization has fixed key order", "[io]") {
    const std::string line = qnoise::serialize_record(sample_record());
    CHECK(line ==
          R"({"circuit_id":"q4-00042","num_qubits":4,"depth":13,)"
          R"("gate_counts":{"cx":2,"measure":4,"x":3},"label":0.125,)"
          R"("preset":"preset-a","shots":1000})");
}

TEST_CASE("record round trip is exact", "[io]") {
    LabeledRecord r = sample_record();
    r.label = 0.123456789012345678;  // exercises the 17-digit path
    const LabeledRecord back = qnoise::deserialize_record(qnoise::serialize_record(r));
    CHECK(back.circuit_id == r.circuit_id);
    CHECK(back.num_qubits == r.num_qubits);
    CHECK(back.depth == r.depth);
    CHECK(back.gate_counts == r.gate_counts);
    CHECK(back.label == r.label);
    CHECK(back.preset == r.preset);
    CHECK(back.shots == r.shots);
}

TEST_CASE("record parse errors", "[io]") {
    CHECK_THROWS_AS(qnoise::deserialize_record("nope"), ParseError);
    CHECK_THROWS_AS(qnoise::deserialize_record("{}"), ParseError);
    std::string line = qnoise::serialize_record(sample_record());
    const size_t at = line.find("0.125");
    line.replace(at, 5, "1.5");
    CHECK_THROWS_AS(qnoise::deserialize_record(line), ParseError);  // label outside [0,1]
}

TEST_CASE("record stream round trip", "[io]") {
    std::vector<LabeledRecord> records = {sample_record(), sample_record()};
    records[1].circuit_id = "q4-00043";
    records[1].label = 0.5;
    std::stringstream buffer;
    qnoise::write_records(buffer, records);
    const std::vector<LabeledRecord> back = qnoise::read_records(buffer);
    REQUIRE(back.size() == 2);
    CHECK(back[0].circuit_id == "q4-00042");
    CHECK(back[1].circuit_id == "q4-00043");
    CHECK(back[1].label == 0.5);
}

ModelFile fitted_linreg() {
    Matrix x(4, 2);
    const double rows[4][2] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
    std::vector<double> y;
    for (size_t r = 0; r < 4; ++r) {
        x.at(r, 0) = rows[r][0];
        x.at(r, 1) = rows[r][1];
        y.push_back(1.0 + 2.0 * rows[r][0] - 0.5 * rows[r][1]);
    }
    ModelFile m;
    m.algorithm = "linreg";
    m.preset = "preset-a";
    m.vocabulary = {"a", "b"};
    m.linear.fit(x, y);
    return m;
}

TEST_CASE("linreg model round trip is bit exact", "[io]") {
    const ModelFile m = fitted_linreg();
    const std::string text = qnoise::serialize_model(m);
    CHECK(text == qnoise::serialize_model(m));
    const ModelFile back = qnoise::deserialize_model(text);
    CHECK(back.algorithm == "linreg");
    CHECK(back.preset == "preset-a");
    CHECK(back.vocabulary == m.vocabulary);
    CHECK(back.ablate.empty());
    CHECK(back.linear.weights() == m.linear.weights());
    CHECK(back.linear.intercept() == m.linear.intercept());
    CHECK(qnoise::serialize_model(back) == text);
}

TEST_CASE("gbdt model round trip is bit exact", "[io]") {
    qnoise::Xoshiro256StarStar rng(4);
    Matrix x(120, 3);
    std::vector<double> y(120);
    for (size_t r = 0; r < 120; ++r) {
        for (size_t c = 0; c < 3; ++c) {
            x.at(r, c) = rng.uniform01();
        }
        y[r] = x.at(r, 0) + 0.5 * x.at(r, 1) * x.at(r, 2);
    }
    for (const char* algorithm : {"gbdt-hist", "gbdt-newton"}) {
        ModelFile m;
        m.algorithm = algorithm;
        m.preset = "preset-b";
        m.vocabulary = {"f0", "f1", "f2"};
        qnoise::GbdtConfig config = qnoise::gbdt_default_config(
            std::string(algorithm) == "gbdt-hist" ? qnoise::GbdtMode::HistFirstOrder
                                                  : qnoise::GbdtMode::Newton);
        config.iterations = 5;
        m.gbdt.fit(x, y, config, 0);
        const std::string text = qnoise::serialize_model(m);
        const ModelFile back = qnoise::deserialize_model(text);
        CHECK(qnoise::serialize_model(back) == text);
        // Restored model predicts identically.
        for (size_t r = 0; r < 10; ++r) {
            CHECK(back.gbdt.predict_one(x.row(r)) == m.gbdt.predict_one(x.row(r)));
        }
    }
}

TEST_CASE("nn model round trip is bit exact", "[io]") {
    qnoise::Xoshiro256StarStar rng(8);
    std::vector<qnoise::TokenGrid> grids(12);
    std::vector<double> y(12);
    for (size_t i = 0; i < grids.size(); ++i) {
        for (int row = 0; row < 6; ++row) {
            for (int q = 0; q < 4; ++q) {
                grids[i].at(row, q) = static_cast<uint8_t>(rng.below(11));
            }
        }
        y[i] = rng.uniform01();
    }
    for (const char* algorithm : {"nn-dense", "nn-cnn"}) {
        ModelFile m;
        m.algorithm = algorithm;
        m.preset = "preset-a";
        m.vocabulary = qnoise::default_vocabulary().names();
        qnoise::NnConfig config;
        config.epochs = 2;
        m.nn.configure(std::string(algorithm) == "nn-dense" ? qnoise::NnArch::Dense
                                                            : qnoise::NnArch::Cnn,
                       config);
        m.nn.fit(grids, y, 3);
        const std::string text = qnoise::serialize_model(m);
        const ModelFile back = qnoise::deserialize_model(text);
        CHECK(qnoise::serialize_model(back) == text);
        for (const qnoise::TokenGrid& g : grids) {
            CHECK(back.nn.predict_one(g) == m.nn.predict_one(g));
        }
    }
}

TEST_CASE("model parse errors", "[io]") {
    CHECK_THROWS_AS(qnoise::deserialize_model("not json"), ParseError);
    CHECK_THROWS_AS(qnoise::deserialize_model("{}"), ParseError);

    const std::string good = qnoise::serialize_model(fitted_linreg());

    std::string bad_version = good;
    bad_version.replace(bad_version.find("\"format_version\":1"),
                        std::string("\"format_version\":1").size(), "\"format_version\":9");
    CHECK_THROWS_AS(qnoise::deserialize_model(bad_version), ParseError);

    std::string bad_algorithm = good;
    bad_algorithm.replace(bad_algorithm.find("linreg"), 6, "krigin");
    CHECK_THROWS_AS(qnoise::deserialize_model(bad_algorithm), ParseError);
}

TEST_CASE("algorithm and payload kind must agree", "[io]") {
    // A gbdt-hist envelope around a newton-mode payload is rejected.
    qnoise::Xoshiro256StarStar rng(4);
    Matrix x(60, 2);
    std::vector<double> y(60);
    for (size_t r = 0; r < 60; ++r) {
        x.at(r, 0) = rng.uniform01();
        x.at(r, 1) = rng.uniform01();
        y[r] = x.at(r, 0);
    }
    ModelFile m;
    m.algorithm = "gbdt-newton";
    m.vocabulary = {"f0", "f1"};
    qnoise::GbdtConfig config = qnoise::gbdt_default_config(qnoise::GbdtMode::Newton);
    config.iterations = 2;
    m.gbdt.fit(x, y, config, 0);
    std::string text = qnoise::serialize_model(m);
    const std::string from = "\"algorithm\":\"gbdt-newton\"";
    text.replace(text.find(from), from.size(), "\"algorithm\":\"gbdt-hist\"");
    CHECK_THROWS_AS(qnoise::deserialize_model(text), ParseError);
}

TEST_CASE("file-level write and read", "[io]") {
    const std::string path = "test_model_roundtrip.json";
    const ModelFile m = fitted_linreg();
    qnoise::write_model(path, m);
    const ModelFile back = qnoise::read_model(path);
    CHECK(qnoise::serialize_model(back) == qnoise::serialize_model(m));
    std::remove(path.c_str());
    CHECK_THROWS_AS(qnoise::read_model("no_such_model_file.json"), std::runtime_error);
}

}  // namespace
