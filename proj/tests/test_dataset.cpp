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

#include <algorithm>
#include <atomic>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "qnoise/dataset.hpp"
#include "qnoise/dataset_io.hpp"
#include "qnoise/generate.hpp"
#include "qnoise/noise.hpp"
#include "qnoise/parallel.hpp"

namespace {

using qnoise::Circuit;
using qnoise::Gate;
using qnoise::GateOp;
using qnoise::LabeledRecord;
using qnoise::NoiseModel;

std::vector<Circuit> small_corpus(int count) {
    qnoise::CorpusSpec spec;
    spec.per_qubit_count = count;
    spec.qubit_lo = 3;
    spec.qubit_hi = 4;
    spec.depth_lo = 2;
    spec.depth_hi = 10;
    spec.master_seed = 5;
    return qnoise::generate_corpus(spec);
}

TEST_CASE("label_circuit fills every field", "[dataset]") {
    const Circuit c = qnoise::random_circuit(4, 8, 2);
    const NoiseModel noise = qnoise::noise_preset("preset-a");
    const LabeledRecord r = qnoise::label_circuit(c, noise, "preset-a", 500, 77);
    CHECK(r.circuit_id == c.id);
    CHECK(r.num_qubits == 4);
    CHECK(r.depth == qnoise::layered_depth(c));
    CHECK(r.depth == 9);
    CHECK(r.gate_counts.at("measure") == 4);
    CHECK(r.label >= 0.0);
    CHECK(r.label <= 1.0);
    CHECK(r.preset == "preset-a");
    CHECK(r.shots == 500);
}

TEST_CASE("zero noise labels are sampling noise only", "[dataset]") {
    const NoiseModel zero;
    for (uint64_t seed : {uint64_t{1}, uint64_t{2}}) {
        const Circuit c = qnoise::random_circuit(5, 15, seed);
        const LabeledRecord r = qnoise::label_circuit(c, zero, "custom", 10000, seed);
        CHECK(r.label < 0.02);
    }
}

TEST_CASE("full readout error gives label 1", "[dataset]") {
    Circuit c;
    c.id = "x";
    c.num_qubits = 1;
    c.ops = {GateOp(Gate::X, 0), GateOp(Gate::Measure, 0)};
    NoiseModel noise;
    noise.p_ro = 1.0;
    const LabeledRecord r = qnoise::label_circuit(c, noise, "custom", 100, 0);
    CHECK(r.label == 1.0);
}

TEST_CASE("build_dataset keeps circuit order and ids", "[dataset]") {
    const std::vector<Circuit> circuits = small_corpus(5);
    const NoiseModel noise = qnoise::noise_preset("preset-a");
    const std::vector<LabeledRecord> records =
        qnoise::build_dataset(circuits, noise, "preset-a", 100, 3);
    REQUIRE(records.size() == circuits.size());
    for (size_t i = 0; i < records.size(); ++i) {
        CHECK(records[i].circuit_id == circuits[i].id);
    }
}

TEST_CASE("build_dataset is parallelism invariant", "[dataset]") {
    const std::vector<Circuit> circuits = small_corpus(8);
    const NoiseModel noise = qnoise::noise_preset("preset-b");
    const std::vector<LabeledRecord> serial =
        qnoise::build_dataset(circuits, noise, "preset-b", 200, 9, 1);
    const std::vector<LabeledRecord> parallel =
        qnoise::build_dataset(circuits, noise, "preset-b", 200, 9, 8);
    REQUIRE(serial.size() == parallel.size());
    std::stringstream a;
    std::stringstream b;
    qnoise::write_records(a, serial);
    qnoise::write_records(b, parallel);
    CHECK(a.str() == b.str());
}

TEST_CASE("build_dataset reports progress in thousands", "[dataset]") {
    qnoise::CorpusSpec spec;
    spec.per_qubit_count = 1100;
    spec.qubit_lo = 2;
    spec.qubit_hi = 2;
    spec.depth_lo = 2;
    spec.depth_hi = 3;
    const std::vector<Circuit> circuits = qnoise::generate_corpus(spec);
    const NoiseModel zero;
    std::vector<int64_t> ticks;
    qnoise::build_dataset(circuits, zero, "custom", 2, 0, 1,
                          [&](int64_t done) { ticks.push_back(done); });
    CHECK(ticks == std::vector<int64_t>{1000});
}

TEST_CASE("build_dataset rejects empty input and reports failing ids", "[dataset]") {
    const NoiseModel noise;
    CHECK_THROWS_AS(qnoise::build_dataset({}, noise, "custom", 10, 0),
                    std::invalid_argument);

    Circuit bad;
    bad.id = "broken-circuit";
    bad.num_qubits = 0;  // invalid: simulation will throw
    try {
        qnoise::build_dataset({bad}, noise, "custom", 10, 0);
        FAIL("expected failure");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("broken-circuit") != std::string::npos);
    }
}

TEST_CASE("labels depend on the master seed", "[dataset]") {
    const std::vector<Circuit> circuits = small_corpus(3);
    const NoiseModel noise = qnoise::noise_preset("preset-a");
    const std::vector<LabeledRecord> a =
        qnoise::build_dataset(circuits, noise, "preset-a", 300, 1);
    const std::vector<LabeledRecord> b =
        qnoise::build_dataset(circuits, noise, "preset-a", 300, 2);
    bool any_differs = false;
    for (size_t i = 0; i < a.size(); ++i) {
        any_differs = any_differs || a[i].label != b[i].label;
    }
    CHECK(any_differs);
}

TEST_CASE("split_indices is a disjoint exhaustive seeded permutation", "[dataset]") {
    qnoise::SplitSpec spec;
    spec.train_fraction = 0.8;
    spec.seed = 4;
    const auto [train, test] = qnoise::split_indices(100, spec);
    CHECK(train.size() == 80);
    CHECK(test.size() == 20);
    std::set<size_t> all(train.begin(), train.end());
    all.insert(test.begin(), test.end());
    CHECK(all.size() == 100);

    const auto [train2, test2] = qnoise::split_indices(100, spec);
    CHECK(train == train2);
    CHECK(test == test2);

    spec.seed = 5;
    const auto [train3, test3] = qnoise::split_indices(100, spec);
    CHECK(train != train3);
}

TEST_CASE("split matches the study sizes", "[dataset]") {
    qnoise::SplitSpec spec;
    spec.train_fraction = 0.01;
    const auto [t1, v1] = qnoise::split_indices(35000, spec);
    CHECK(t1.size() == 350);
    CHECK(v1.size() == 34650);
    spec.train_fraction = 0.8;
    const auto [t2, v2] = qnoise::split_indices(35000, spec);
    CHECK(t2.size() == 28000);
    CHECK(v2.size() == 7000);
}

TEST_CASE("degenerate splits are rejected", "[dataset]") {
    qnoise::SplitSpec spec;
    spec.train_fraction = 0.0;
    CHECK_THROWS_AS(qnoise::split_indices(10, spec), std::invalid_argument);
    spec.train_fraction = 1.0;
    CHECK_THROWS_AS(qnoise::split_indices(10, spec), std::invalid_argument);
    spec.train_fraction = 0.5;
    CHECK_THROWS_AS(qnoise::split_indices(1, spec), std::invalid_argument);
    spec.train_fraction = 0.01;
    CHECK_THROWS_AS(qnoise::split_indices(10, spec), std::invalid_argument);  // empty train
}

TEST_CASE("parallel_ordered_map preserves order under contention", "[parallel]") {
    const int64_t n = 503;
    for (int workers : {1, 3, 8}) {
        const std::vector<int64_t> out = qnoise::parallel_ordered_map<int64_t>(
            n, workers, [](int64_t i) { return i * i; }, 100, nullptr);
        REQUIRE(out.size() == static_cast<size_t>(n));
        for (int64_t i = 0; i < n; ++i) {
            REQUIRE(out[static_cast<size_t>(i)] == i * i);
        }
    }
}

TEST_CASE("parallel_ordered_map propagates worker exceptions", "[parallel]") {
    CHECK_THROWS_AS(qnoise::parallel_ordered_map<int>(
                        10, 4,
                        [](int64_t i) -> int {
                            if (i == 7) {
                                throw std::runtime_error("boom");
                            }
                            return static_cast<int>(i);
                        },
                        100, nullptr),
                    std::runtime_error);
}

}  // namespace
