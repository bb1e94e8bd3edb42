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
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "qnoise/circuit.hpp"
#include "qnoise/gates.hpp"
#include "qnoise/prng.hpp"

namespace qnoise {

inline constexpr double kTau = 6.2831853071795864769;  // 2*pi

namespace internal {

/// Appends `depth` fully packed columns drawn from `rng`. The circuit first
/// draws a composition profile — a two-qubit-gate density in [0.05, 0.75]
/// plus one weight in [0.05, 1] per single-qubit kind — so circuits of equal
/// size still differ widely in their per-kind gate counts. Per column:
/// shuffle the qubit order, then walk it, taking a uniformly chosen two-qubit
/// kind with the profile's density whenever two qubits remain and a weighted
/// single-qubit kind otherwise (measure excluded throughout). Angle
/// parameters are uniform in [0, 2*pi). Every column covers each qubit
/// exactly once, so the circuit's layered depth equals the column count.
inline void append_random_columns(Circuit& c, int depth, Xoshiro256StarStar& rng,
                                  const GateVocabulary& vocabulary) {
    std::vector<Gate> singles;  // arity 1, measure excluded
    std::vector<int> single_params;
    std::vector<Gate> pairs;
    std::vector<int> pair_params;
    for (const GateKind& k : vocabulary.kinds()) {
        if (k.name == "measure") {
            continue;
        }
        const Gate g = gate_from_name(k.name);
        if (k.arity == 1) {
            singles.push_back(g);
            single_params.push_back(k.param_count);
        } else {
            pairs.push_back(g);
            pair_params.push_back(k.param_count);
        }
    }
    if (singles.empty()) {
        throw std::invalid_argument("vocabulary has no 1-qubit non-measure gate");
    }

    const double pair_density = pairs.empty() ? 0.0 : rng.uniform(0.05, 0.75);
    std::vector<double> single_cdf(singles.size());
    double weight_sum = 0.0;
    for (size_t i = 0; i < singles.size(); ++i) {
        weight_sum += rng.uniform(0.05, 1.0);
        single_cdf[i] = weight_sum;
    }

    std::vector<int> order(static_cast<size_t>(c.num_qubits));
    std::iota(order.begin(), order.end(), 0);
    for (int col = 0; col < depth; ++col) {
        rng.shuffle(order);
        size_t pos = 0;
        while (pos < order.size()) {
            const size_t remaining = order.size() - pos;
            GateOp op;
            if (remaining >= 2 && rng.uniform01() < pair_density) {
                const size_t pick = static_cast<size_t>(rng.below(pairs.size()));
                op.kind = pairs[pick];
                op.qubits[0] = static_cast<uint8_t>(order[pos++]);
                op.qubits[1] = static_cast<uint8_t>(order[pos++]);
                if (pair_params[pick] == 1) {
                    op.param = rng.uniform(0.0, kTau);
                }
            } else {
                const double r = rng.uniform(0.0, weight_sum);
                size_t pick = 0;
                while (pick + 1 < singles.size() && r >= single_cdf[pick]) {
                    ++pick;
                }
                op.kind = singles[pick];
                op.qubits[0] = static_cast<uint8_t>(order[pos++]);
                if (single_params[pick] == 1) {
                    op.param = rng.uniform(0.0, kTau);
                }
            }
            c.ops.push_back(op);
        }
    }
}

}  // namespace internal

/// Builds a random circuit: `depth` packed columns of gates followed by one
/// measure per qubit, so the layered depth is depth + 1 and count(measure)
/// equals num_qubits. Deterministic in (num_qubits, depth, seed, vocabulary).
inline Circuit random_circuit(int num_qubits, int depth, uint64_t seed,
                              const GateVocabulary& vocabulary = default_vocabulary()) {
    if (num_qubits < 1 || num_qubits > kMaxSimQubits) {
        throw std::invalid_argument("random_circuit: num_qubits " + std::to_string(num_qubits) +
                                    " outside 1.." + std::to_string(kMaxSimQubits));
    }
    if (depth < 1) {
        throw std::invalid_argument("random_circuit: depth must be >= 1, got " +
                                    std::to_string(depth));
    }
    Circuit c;
    c.num_qubits = num_qubits;
    Xoshiro256StarStar rng(seed);
    internal::append_random_columns(c, depth, rng, vocabulary);
    for (int q = 0; q < num_qubits; ++q) {
        c.ops.emplace_back(Gate::Measure, q);
    }
    return c;
}

/// Parameters of a generated corpus: per_qubit_count circuits for every qubit
/// value in [qubit_lo, qubit_hi], each with a depth drawn uniformly from
/// [depth_lo, depth_hi]. The defaults reproduce the 35,000-circuit study
/// corpus (5,000 circuits per qubit count 4..10, depths 2..50).
struct CorpusSpec {
    uint64_t master_seed = 0;
    int per_qubit_count = 5000;
    int qubit_lo = 4;
    int qubit_hi = 10;
    int depth_lo = 2;
    int depth_hi = 50;

    int64_t total_count() const {
        return static_cast<int64_t>(qubit_hi - qubit_lo + 1) * per_qubit_count;
    }
};

inline void validate_corpus_spec(const CorpusSpec& spec) {
    if (spec.per_qubit_count < 1) {
        throw std::invalid_argument("corpus: per_qubit_count must be >= 1");
    }
    if (spec.qubit_lo < 1 || spec.qubit_lo > spec.qubit_hi || spec.qubit_hi > kMaxSimQubits) {
        throw std::invalid_argument("corpus: qubit range " + std::to_string(spec.qubit_lo) + ".." +
                                    std::to_string(spec.qubit_hi) + " invalid (bounds 1.." +
                                    std::to_string(kMaxSimQubits) + ")");
    }
    if (spec.depth_lo < 1 || spec.depth_lo > spec.depth_hi) {
        throw std::invalid_argument("corpus: depth range " + std::to_string(spec.depth_lo) + ".." +
                                    std::to_string(spec.depth_hi) + " invalid");
    }
}

/// The corpus circuit at global index `index` (0-based, qubit counts in
/// ascending blocks of per_qubit_count). A pure function of (spec, index):
/// the per-circuit seed is splitmix64(master_seed ^ index), the depth is the
/// seeded generator's first draw, and the columns consume the rest of the
/// stream — so any evaluation order or parallelism degree yields the same
/// corpus. Ids are "q{num_qubits}-{index:05}".
inline Circuit corpus_circuit(const CorpusSpec& spec, int64_t index,
                              const GateVocabulary& vocabulary = default_vocabulary()) {
    validate_corpus_spec(spec);
    if (index < 0 || index >= spec.total_count()) {
        throw std::invalid_argument("corpus: index " + std::to_string(index) + " outside 0.." +
                                    std::to_string(spec.total_count() - 1));
    }
    const int num_qubits = spec.qubit_lo + static_cast<int>(index / spec.per_qubit_count);
    Xoshiro256StarStar rng(splitmix64(spec.master_seed ^ static_cast<uint64_t>(index)));
    const int depth =
        spec.depth_lo +
        static_cast<int>(rng.below(static_cast<uint64_t>(spec.depth_hi - spec.depth_lo + 1)));
    Circuit c;
    c.num_qubits = num_qubits;
    char id_buf[32];
    std::snprintf(id_buf, sizeof(id_buf), "q%d-%05lld", num_qubits,
                  static_cast<long long>(index));
    c.id = id_buf;
    internal::append_random_columns(c, depth, rng, vocabulary);
    for (int q = 0; q < num_qubits; ++q) {
        c.ops.emplace_back(Gate::Measure, q);
    }
    return c;
}

/// Materializes the whole corpus in index order. Prefer corpus_circuit for
/// streaming large corpora.
inline std::vector<Circuit> generate_corpus(const CorpusSpec& spec,
                                            const GateVocabulary& vocabulary =
                                                default_vocabulary()) {
    validate_corpus_spec(spec);
    std::vector<Circuit> out;
    out.reserve(static_cast<size_t>(spec.total_count()));
    for (int64_t i = 0; i < spec.total_count(); ++i) {
        out.push_back(corpus_circuit(spec, i, vocabulary));
    }
    return out;
}

}  // namespace qnoise
