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

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qnoise/circuit.hpp"
#include "qnoise/noise.hpp"
#include "qnoise/prng.hpp"
#include "qnoise/statevector.hpp"

namespace qnoise {

/// Histogram of measured bitstrings. Strings cover all n qubits, rendered
/// most-significant-qubit-first (character j is qubit n-1-j); qubits the
/// circuit never measures report 0, the classical-register default.
struct OutcomeDistribution {
    std::map<std::string, uint64_t> counts;
    uint64_t shots = 0;
};

/// Renders basis index `index` as a bitstring, masking out unmeasured qubits.
inline std::string render_bitstring(size_t index, int num_qubits, uint64_t measured_mask) {
    std::string s(static_cast<size_t>(num_qubits), '0');
    for (int q = 0; q < num_qubits; ++q) {
        if ((measured_mask >> q) & 1) {
            s[static_cast<size_t>(num_qubits - 1 - q)] =
                static_cast<char>('0' + ((index >> q) & 1));
        }
    }
    return s;
}

namespace internal {

inline uint64_t measured_mask_of(const Circuit& c) {
    uint64_t mask = 0;
    for (const GateOp& op : c.ops) {
        if (op.kind == Gate::Measure) {
            mask |= uint64_t{1} << op.qubits[0];
        }
    }
    return mask;
}

inline bool has_reset(const Circuit& c) {
    for (const GateOp& op : c.ops) {
        if (op.kind == Gate::Reset) {
            return true;
        }
    }
    return false;
}

/// One shot of the trajectory engine. Draw order per shot is fixed:
/// per op in circuit order — for a unitary, one uniform trigger, then (only
/// if triggered) one bounded Pauli pick; for a reset, one uniform for the
/// projective outcome, then (noisy only) one uniform for the leave-in-one
/// error; measure draws nothing at op time. Then one uniform samples the
/// final joint index, and one uniform per measured qubit (ascending) decides
/// the readout flip.
inline std::string trajectory_shot(const Circuit& c, const NoiseModel* noise,
                                   uint64_t measured_mask, Xoshiro256StarStar& rng) {
    StateVector state(c.num_qubits);
    for (const GateOp& op : c.ops) {
        switch (op.kind) {
            case Gate::Measure:
                break;
            case Gate::Reset: {
                state.reset_qubit(op.qubits[0], rng.uniform01());
                if (noise != nullptr && rng.uniform01() < noise->rate_for(Gate::Reset)) {
                    state.apply_pauli(1, op.qubits[0]);  // left in |1>
                }
                break;
            }
            default: {
                state.apply(op);
                if (noise == nullptr) {
                    break;
                }
                const double rate = noise->rate_for(op.kind);
                if (gate_arity(op.kind) == 1) {
                    if (rng.uniform01() < rate) {
                        state.apply_pauli(1 + static_cast<int>(rng.below(3)), op.qubits[0]);
                    }
                } else {
                    if (rng.uniform01() < rate) {
                        // Non-identity pairs indexed 1..15 in base 4:
                        // (pauli on qubits[0], pauli on qubits[1]).
                        const int pair = 1 + static_cast<int>(rng.below(15));
                        const int pa = pair / 4;
                        const int pb = pair % 4;
                        if (pa != 0) {
                            state.apply_pauli(pa, op.qubits[0]);
                        }
                        if (pb != 0) {
                            state.apply_pauli(pb, op.qubits[1]);
                        }
                    }
                }
                break;
            }
        }
    }
    size_t index = state.sample_index(rng.uniform01());
    if (noise != nullptr) {
        const double p_flip = noise->rate_for(Gate::Measure);
        for (int q = 0; q < c.num_qubits; ++q) {
            if (((measured_mask >> q) & 1) && rng.uniform01() < p_flip) {
                index ^= size_t{1} << q;
            }
        }
    }
    return render_bitstring(index, c.num_qubits, measured_mask);
}

/// Runs `shots` trajectories with per-shot seeds splitmix64(seed ^ shot), so
/// any shot-level parallel schedule reproduces the same histogram.
inline OutcomeDistribution run_trajectories(const Circuit& c, uint64_t shots,
                                            const NoiseModel* noise, uint64_t seed) {
    const uint64_t measured = measured_mask_of(c);
    OutcomeDistribution dist;
    dist.shots = shots;
    for (uint64_t shot = 0; shot < shots; ++shot) {
        Xoshiro256StarStar rng(splitmix64(seed ^ shot));
        ++dist.counts[trajectory_shot(c, noise, measured, rng)];
    }
    return dist;
}

}  // namespace internal

/// Noise-free execution. Reset-free circuits take a fast path: one
/// statevector evolution, then per-shot sampling by cumulative-probability
/// inversion (one uniform per shot from a single xoshiro256**(seed) stream).
/// Circuits with resets fall back to per-shot trajectories.
inline OutcomeDistribution run_ideal(const Circuit& c, uint64_t shots, uint64_t seed) {
    validate_circuit(c);
    if (shots < 1) {
        throw std::invalid_argument("run_ideal: shots must be >= 1");
    }
    if (internal::has_reset(c)) {
        return internal::run_trajectories(c, shots, nullptr, seed);
    }
    StateVector state(c.num_qubits);
    for (const GateOp& op : c.ops) {
        if (gate_is_unitary(op.kind)) {
            state.apply(op);
        }
    }
    std::vector<double> cumulative(state.size());
    double acc = 0.0;
    for (size_t i = 0; i < state.size(); ++i) {
        acc += std::norm(state.amplitudes()[i]);
        cumulative[i] = acc;
    }
    const uint64_t measured = internal::measured_mask_of(c);
    OutcomeDistribution dist;
    dist.shots = shots;
    Xoshiro256StarStar rng(seed);
    for (uint64_t shot = 0; shot < shots; ++shot) {
        const double u = rng.uniform01();
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        size_t index;
        if (it != cumulative.end()) {
            index = static_cast<size_t>(it - cumulative.begin());
        } else {
            // Rounding left the cumulative total marginally below u; take the
            // last index that carries probability mass.
            index = state.size() - 1;
            while (index > 0 && std::norm(state.amplitudes()[index]) == 0.0) {
                --index;
            }
        }
        ++dist.counts[render_bitstring(index, c.num_qubits, measured)];
    }
    return dist;
}

/// Monte Carlo noisy execution: per-shot trajectories with Pauli insertion
/// after each unitary, faulty resets, and readout flips per the model.
inline OutcomeDistribution run_noisy(const Circuit& c, uint64_t shots, const NoiseModel& noise,
                                     uint64_t seed) {
    validate_circuit(c);
    validate_noise_model(noise);
    if (shots < 1) {
        throw std::invalid_argument("run_noisy: shots must be >= 1");
    }
    return internal::run_trajectories(c, shots, &noise, seed);
}

}  // namespace qnoise
