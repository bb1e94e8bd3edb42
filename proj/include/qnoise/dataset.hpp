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
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qnoise/circuit.hpp"
#include "qnoise/distance.hpp"
#include "qnoise/features.hpp"
#include "qnoise/parallel.hpp"
#include "qnoise/prng.hpp"
#include "qnoise/sim.hpp"

namespace qnoise {

/// One training example: circuit structure summary plus the noise label.
/// `depth` is the layered depth (for generated circuits, drawn columns + the
/// measurement layer). `label` is the cosine distance between the ideal and
/// noisy outcome distributions.
struct LabeledRecord {
    std::string circuit_id;
    int num_qubits = 0;
    int depth = 0;
    std::map<std::string, int> gate_counts;
    double label = 0.0;
    std::string preset;
    uint64_t shots = 0;
};

/// Fraction of records that becomes the training set, plus the shuffle seed.
struct SplitSpec {
    double train_fraction = 0.8;
    uint64_t seed = 0;
};

/// Labels one circuit: ideal and noisy runs use seeds splitmix64(seed ^ 0)
/// and splitmix64(seed ^ 1); the label is their cosine distance.
inline LabeledRecord label_circuit(const Circuit& c, const NoiseModel& noise,
                                   const std::string& preset_name, uint64_t shots,
                                   uint64_t seed) {
    const OutcomeDistribution ideal = run_ideal(c, shots, splitmix64(seed ^ 0));
    const OutcomeDistribution noisy = run_noisy(c, shots, noise, splitmix64(seed ^ 1));
    LabeledRecord r;
    r.circuit_id = c.id;
    r.num_qubits = c.num_qubits;
    r.depth = layered_depth(c);
    const FeatureVector fv = featurize_counts(c, default_vocabulary());
    for (size_t j = 0; j < fv.schema.size(); ++j) {
        r.gate_counts[fv.schema[j]] = static_cast<int>(fv.values[j]);
    }
    r.label = cosine_distance(ideal, noisy);
    r.preset = preset_name;
    r.shots = shots;
    return r;
}

/// Labels every circuit; one record per circuit, in circuit order; circuit i
/// uses seed splitmix64(master_seed ^ i), so output is identical for any
/// parallelism degree. A failing circuit aborts the build with its id.
inline std::vector<LabeledRecord> build_dataset(
    const std::vector<Circuit>& circuits, const NoiseModel& noise,
    const std::string& preset_name, uint64_t shots, uint64_t master_seed, int parallelism = 1,
    const std::function<void(int64_t)>& progress = nullptr) {
    if (circuits.empty()) {
        throw std::invalid_argument("build_dataset: no circuits");
    }
    return parallel_ordered_map<LabeledRecord>(
        static_cast<int64_t>(circuits.size()), parallelism,
        [&](int64_t i) {
            const Circuit& c = circuits[static_cast<size_t>(i)];
            try {
                return label_circuit(c, noise, preset_name, shots,
                                     splitmix64(master_seed ^ static_cast<uint64_t>(i)));
            } catch (const std::exception& e) {
                throw std::runtime_error("labeling circuit '" + c.id + "' failed: " + e.what());
            }
        },
        1000, progress);
}

/// Seeded uniform permutation of [0, n); the first floor(fraction * n)
/// indices train, the rest test. Disjoint and exhaustive by construction.
inline std::pair<std::vector<size_t>, std::vector<size_t>> split_indices(size_t n,
                                                                         const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
        throw std::invalid_argument("split: train_fraction must be in (0, 1)");
    }
    if (n < 2) {
        throw std::invalid_argument("split: need at least 2 records");
    }
    const size_t train_count =
        static_cast<size_t>(spec.train_fraction * static_cast<double>(n));
    if (train_count < 1 || train_count >= n) {
        throw std::invalid_argument("split: train_fraction " +
                                    std::to_string(spec.train_fraction) + " of " +
                                    std::to_string(n) + " records leaves an empty side");
    }
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    Xoshiro256StarStar rng(spec.seed);
    rng.shuffle(order);
    std::vector<size_t> train(order.begin(), order.begin() + static_cast<int64_t>(train_count));
    std::vector<size_t> test(order.begin() + static_cast<int64_t>(train_count), order.end());
    return {std::move(train), std::move(test)};
}

/// Record-level split wrapper around split_indices.
inline std::pair<std::vector<LabeledRecord>, std::vector<LabeledRecord>> split(
    const std::vector<LabeledRecord>& records, const SplitSpec& spec) {
    const auto [train_idx, test_idx] = split_indices(records.size(), spec);
    std::pair<std::vector<LabeledRecord>, std::vector<LabeledRecord>> out;
    out.first.reserve(train_idx.size());
    out.second.reserve(test_idx.size());
    for (size_t i : train_idx) {
        out.first.push_back(records[i]);
    }
    for (size_t i : test_idx) {
        out.second.push_back(records[i]);
    }
    return out;
}

}  // namespace qnoise
