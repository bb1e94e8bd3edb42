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

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "qnoise/circuit.hpp"
#include "qnoise/errors.hpp"
#include "qnoise/gates.hpp"

namespace qnoise {

/// Dense statevector over n qubits, little-endian: bit k of the amplitude
/// index is qubit k. (Bitstrings shown to users are rendered most-significant
/// -qubit-first; see sim.hpp.)
class StateVector {
public:
    using Amplitude = std::complex<double>;

    explicit StateVector(int num_qubits) : num_qubits_(num_qubits) {
        if (num_qubits < 1 || num_qubits > kMaxSimQubits) {
            throw CapacityError("statevector supports 1.." + std::to_string(kMaxSimQubits) +
                                " qubits, got " + std::to_string(num_qubits));
        }
        amps_.assign(size_t{1} << num_qubits, Amplitude(0.0, 0.0));
        amps_[0] = Amplitude(1.0, 0.0);
    }

    int num_qubits() const noexcept { return num_qubits_; }
    size_t size() const noexcept { return amps_.size(); }
    const std::vector<Amplitude>& amplitudes() const noexcept { return amps_; }
    Amplitude amplitude(size_t index) const { return amps_.at(index); }

    double norm() const noexcept {
        double s = 0.0;
        for (const Amplitude& a : amps_) {
            s += std::norm(a);
        }
        return std::sqrt(s);
    }

    /// Applies a unitary gate op. reset/measure are trajectory-level and
    /// rejected here.
    void apply(const GateOp& op) {
        if (!gate_is_unitary(op.kind)) {
            throw std::invalid_argument(std::string("apply: '") + gate_name(op.kind) +
                                        "' is not a unitary gate");
        }
        switch (op.kind) {
            case Gate::Id:
                return;
            case Gate::X:
                apply_x(op.qubits[0]);
                return;
            case Gate::Rz:
                apply_rz(op.qubits[0], op.param);
                return;
            case Gate::Cx:
                apply_cx(op.qubits[0], op.qubits[1]);
                return;
            case Gate::Cz:
                apply_cz(op.qubits[0], op.qubits[1]);
                return;
            case Gate::Swap:
                apply_swap(op.qubits[0], op.qubits[1]);
                return;
            default:
                apply_one_qubit(gate_unitary(op.kind, op.param), op.qubits[0]);
                return;
        }
    }

    /// Applies a single-qubit Pauli: 1 = X, 2 = Y, 3 = Z.
    void apply_pauli(int pauli, int qubit) {
        switch (pauli) {
            case 1:
                apply_x(qubit);
                return;
            case 2:
                for_each_pair(qubit, [&](size_t i0, size_t i1) {
                    const Amplitude v0 = amps_[i0];
                    const Amplitude v1 = amps_[i1];
                    amps_[i0] = Amplitude(v1.imag(), -v1.real());   // -i * v1
                    amps_[i1] = Amplitude(-v0.imag(), v0.real());   //  i * v0
                });
                return;
            case 3: {
                const size_t mask = size_t{1} << qubit;
                for (size_t i = 0; i < amps_.size(); ++i) {
                    if (i & mask) {
                        amps_[i] = -amps_[i];
                    }
                }
                return;
            }
            default:
                throw std::invalid_argument("pauli index must be 1 (X), 2 (Y) or 3 (Z)");
        }
    }

    /// Applies a dim-2 or dim-4 unitary directly; the 4-dim basis is
    /// |q0 q1> with local index 2*bit(q0) + bit(q1). Used by tests to check
    /// the specialized gate paths against the matrix representation.
    void apply_matrix(const GateMatrix& u, int q0, int q1 = -1) {
        if (u.dim == 2) {
            apply_one_qubit(u, q0);
            return;
        }
        if (u.dim != 4 || q1 < 0) {
            throw std::invalid_argument("apply_matrix: need dim 2, or dim 4 with two qubits");
        }
        const size_t m0 = size_t{1} << q0;
        const size_t m1 = size_t{1} << q1;
        const size_t offsets[4] = {0, m1, m0, m0 | m1};  // local index order
        for (size_t i = 0; i < amps_.size(); ++i) {
            if ((i & m0) || (i & m1)) {
                continue;
            }
            Amplitude in[4];
            for (int l = 0; l < 4; ++l) {
                in[l] = amps_[i | offsets[l]];
            }
            for (int r = 0; r < 4; ++r) {
                Amplitude acc(0.0, 0.0);
                for (int c = 0; c < 4; ++c) {
                    acc += u.at(r, c) * in[c];
                }
                amps_[i | offsets[static_cast<size_t>(r)]] = acc;
            }
        }
    }

    /// Probability that measuring `qubit` yields 1.
    double prob_one(int qubit) const {
        const size_t mask = size_t{1} << qubit;
        double p = 0.0;
        for (size_t i = 0; i < amps_.size(); ++i) {
            if (i & mask) {
                p += std::norm(amps_[i]);
            }
        }
        return p;
    }

    /// Projects `qubit` onto `outcome` and renormalizes.
    void collapse(int qubit, int outcome, double outcome_prob) {
        if (outcome_prob <= 0.0) {
            throw std::invalid_argument("collapse: outcome has zero probability");
        }
        const size_t mask = size_t{1} << qubit;
        const double scale = 1.0 / std::sqrt(outcome_prob);
        for (size_t i = 0; i < amps_.size(); ++i) {
            const bool bit = (i & mask) != 0;
            if (bit == (outcome != 0)) {
                amps_[i] *= scale;
            } else {
                amps_[i] = Amplitude(0.0, 0.0);
            }
        }
    }

    /// Projective reset to |0>: measures the qubit with the uniform draw `u`
    /// in [0,1), collapses, and maps a |1> outcome back to |0>.
    void reset_qubit(int qubit, double u) {
        const double p1 = prob_one(qubit);
        const int outcome = (u < p1) ? 1 : 0;
        collapse(qubit, outcome, outcome == 1 ? p1 : 1.0 - p1);
        if (outcome == 1) {
            apply_x(qubit);
        }
    }

    /// Samples a basis index by cumulative-probability inversion of |amp|^2
    /// with the uniform draw `u` in [0,1).
    size_t sample_index(double u) const {
        double acc = 0.0;
        for (size_t i = 0; i < amps_.size(); ++i) {
            acc += std::norm(amps_[i]);
            if (u < acc) {
                return i;
            }
        }
        // Rounding can leave acc marginally below 1; fall back to the last
        // nonzero-probability index.
        for (size_t i = amps_.size(); i > 0; --i) {
            if (std::norm(amps_[i - 1]) > 0.0) {
                return i - 1;
            }
        }
        throw std::runtime_error("sample_index: state has no probability mass");
    }

private:
    template <typename Fn>
    void for_each_pair(int qubit, Fn&& fn) {
        const size_t mask = size_t{1} << qubit;
        const size_t block = mask << 1;
        for (size_t hi = 0; hi < amps_.size(); hi += block) {
            for (size_t lo = 0; lo < mask; ++lo) {
                fn(hi + lo, hi + lo + mask);
            }
        }
    }

    void apply_one_qubit(const GateMatrix& u, int qubit) {
        const Amplitude a = u.at(0, 0), b = u.at(0, 1), c = u.at(1, 0), d = u.at(1, 1);
        for_each_pair(qubit, [&](size_t i0, size_t i1) {
            const Amplitude v0 = amps_[i0];
            const Amplitude v1 = amps_[i1];
            amps_[i0] = a * v0 + b * v1;
            amps_[i1] = c * v0 + d * v1;
        });
    }

    void apply_x(int qubit) {
        for_each_pair(qubit, [&](size_t i0, size_t i1) { std::swap(amps_[i0], amps_[i1]); });
    }

    void apply_rz(int qubit, double theta) {
        const Amplitude e0 = std::exp(Amplitude(0.0, -theta / 2.0));
        const Amplitude e1 = std::exp(Amplitude(0.0, theta / 2.0));
        for_each_pair(qubit, [&](size_t i0, size_t i1) {
            amps_[i0] *= e0;
            amps_[i1] *= e1;
        });
    }

    void apply_cx(int control, int target) {
        const size_t cm = size_t{1} << control;
        const size_t tm = size_t{1} << target;
        for (size_t i = 0; i < amps_.size(); ++i) {
            if ((i & cm) && !(i & tm)) {
                std::swap(amps_[i], amps_[i | tm]);
            }
        }
    }

    void apply_cz(int q0, int q1) {
        const size_t m = (size_t{1} << q0) | (size_t{1} << q1);
        for (size_t i = 0; i < amps_.size(); ++i) {
            if ((i & m) == m) {
                amps_[i] = -amps_[i];
            }
        }
    }

    void apply_swap(int q0, int q1) {
        const size_t m0 = size_t{1} << q0;
        const size_t m1 = size_t{1} << q1;
        for (size_t i = 0; i < amps_.size(); ++i) {
            if ((i & m0) && !(i & m1)) {
                std::swap(amps_[i], amps_[(i & ~m0) | m1]);
            }
        }
    }

    int num_qubits_;
    std::vector<Amplitude> amps_;
};

}  // namespace qnoise
