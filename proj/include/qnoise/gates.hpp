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
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qnoise {

/// Gate identifiers. Values are the integer tokens of the default vocabulary;
/// 0 is reserved for the empty grid cell and is never a gate.
enum class Gate : uint8_t {
    None = 0,
    Id = 1,
    X = 2,
    Sx = 3,
    H = 4,
    Rz = 5,
    Cx = 6,
    Cz = 7,
    Swap = 8,
    Reset = 9,
    Measure = 10,
};

struct GateKind {
    std::string name;
    int arity = 1;        // number of qubits (1 or 2)
    int param_count = 0;  // number of angle parameters (0 or 1)
    int token = 0;        // 1-based position in the vocabulary
};

/// Ordered gate set. Tokens are consecutive 1..|G| in list order; token 0 is
/// the empty-cell marker used by the grid featurizer.
class GateVocabulary {
public:
    explicit GateVocabulary(std::vector<GateKind> kinds) : kinds_(std::move(kinds)) {
        for (size_t i = 0; i < kinds_.size(); ++i) {
            GateKind& k = kinds_[i];
            if (k.arity != 1 && k.arity != 2) {
                throw std::invalid_argument("gate '" + k.name + "': arity must be 1 or 2");
            }
            if (k.param_count != 0 && k.param_count != 1) {
                throw std::invalid_argument("gate '" + k.name + "': param_count must be 0 or 1");
            }
            k.token = static_cast<int>(i) + 1;
            for (size_t j = 0; j < i; ++j) {
                if (kinds_[j].name == k.name) {
                    throw std::invalid_argument("duplicate gate name '" + k.name + "'");
                }
            }
        }
    }

    const std::vector<GateKind>& kinds() const noexcept { return kinds_; }
    size_t size() const noexcept { return kinds_.size(); }

    const GateKind& by_token(int token) const {
        if (token < 1 || static_cast<size_t>(token) > kinds_.size()) {
            throw std::invalid_argument("gate token " + std::to_string(token) +
                                        " out of range 1.." + std::to_string(kinds_.size()));
        }
        return kinds_[static_cast<size_t>(token) - 1];
    }

    /// Returns the kind with the given name, or nullptr.
    const GateKind* find(const std::string& name) const noexcept {
        for (const GateKind& k : kinds_) {
            if (k.name == name) {
                return &k;
            }
        }
        return nullptr;
    }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        out.reserve(kinds_.size());
        for (const GateKind& k : kinds_) {
            out.push_back(k.name);
        }
        return out;
    }

private:
    std::vector<GateKind> kinds_;
};

/// The default 10-gate vocabulary: the IBM basis set {id, x, sx, rz, cx} plus
/// {h, cz, swap, reset} and the terminal {measure}. Tokens 1..10 in this order.
inline const GateVocabulary& default_vocabulary() {
    static const GateVocabulary vocab({
        {"id", 1, 0, 0},
        {"x", 1, 0, 0},
        {"sx", 1, 0, 0},
        {"h", 1, 0, 0},
        {"rz", 1, 1, 0},
        {"cx", 2, 0, 0},
        {"cz", 2, 0, 0},
        {"swap", 2, 0, 0},
        {"reset", 1, 0, 0},
        {"measure", 1, 0, 0},
    });
    return vocab;
}

inline int gate_arity(Gate g) {
    switch (g) {
        case Gate::Cx:
        case Gate::Cz:
        case Gate::Swap:
            return 2;
        case Gate::None:
            throw std::invalid_argument("Gate::None has no arity");
        default:
            return 1;
    }
}

inline int gate_param_count(Gate g) { return g == Gate::Rz ? 1 : 0; }

inline bool gate_is_unitary(Gate g) { return g != Gate::Reset && g != Gate::Measure; }

inline const char* gate_name(Gate g) {
    switch (g) {
        case Gate::Id: return "id";
        case Gate::X: return "x";
        case Gate::Sx: return "sx";
        case Gate::H: return "h";
        case Gate::Rz: return "rz";
        case Gate::Cx: return "cx";
        case Gate::Cz: return "cz";
        case Gate::Swap: return "swap";
        case Gate::Reset: return "reset";
        case Gate::Measure: return "measure";
        case Gate::None: break;
    }
    throw std::invalid_argument("invalid gate token");
}

/// Maps a gate name from the default vocabulary to its enum value.
inline Gate gate_from_name(const std::string& name) {
    for (int t = 1; t <= 10; ++t) {
        const Gate g = static_cast<Gate>(t);
        if (name == gate_name(g)) {
            return g;
        }
    }
    throw std::invalid_argument("unknown gate name '" + name + "'");
}

/// Dense unitary of a gate kind, as a dim x dim row-major complex matrix
/// (dim = 2 or 4). Two-qubit matrices are in the basis |q0 q1> with q0 the
/// first listed operand (control for cx), index = 2*bit(q0) + bit(q1).
struct GateMatrix {
    int dim = 0;
    std::array<std::complex<double>, 16> m{};

    std::complex<double>& at(int r, int c) { return m[static_cast<size_t>(r * dim + c)]; }
    std::complex<double> at(int r, int c) const { return m[static_cast<size_t>(r * dim + c)]; }
};

inline GateMatrix gate_unitary(Gate g, double theta = 0.0) {
    using namespace std::complex_literals;
    GateMatrix u;
    switch (g) {
        case Gate::Id:
            u.dim = 2;
            u.at(0, 0) = 1.0;
            u.at(1, 1) = 1.0;
            return u;
        case Gate::X:
            u.dim = 2;
            u.at(0, 1) = 1.0;
            u.at(1, 0) = 1.0;
            return u;
        case Gate::Sx:
            u.dim = 2;
            u.at(0, 0) = 0.5 + 0.5i;
            u.at(0, 1) = 0.5 - 0.5i;
            u.at(1, 0) = 0.5 - 0.5i;
            u.at(1, 1) = 0.5 + 0.5i;
            return u;
        case Gate::H: {
            u.dim = 2;
            const double s = 1.0 / std::sqrt(2.0);
            u.at(0, 0) = s;
            u.at(0, 1) = s;
            u.at(1, 0) = s;
            u.at(1, 1) = -s;
            return u;
        }
        case Gate::Rz:
            u.dim = 2;
            u.at(0, 0) = std::exp(std::complex<double>(0.0, -theta / 2.0));
            u.at(1, 1) = std::exp(std::complex<double>(0.0, theta / 2.0));
            return u;
        case Gate::Cx:
            u.dim = 4;
            u.at(0, 0) = 1.0;
            u.at(1, 1) = 1.0;
            u.at(2, 3) = 1.0;  // |10> -> |11>
            u.at(3, 2) = 1.0;
            return u;
        case Gate::Cz:
            u.dim = 4;
            u.at(0, 0) = 1.0;
            u.at(1, 1) = 1.0;
            u.at(2, 2) = 1.0;
            u.at(3, 3) = -1.0;
            return u;
        case Gate::Swap:
            u.dim = 4;
            u.at(0, 0) = 1.0;
            u.at(1, 2) = 1.0;
            u.at(2, 1) = 1.0;
            u.at(3, 3) = 1.0;
            return u;
        default:
            throw std::invalid_argument(std::string("gate '") + gate_name(g) +
                                        "' has no unitary representation");
    }
}

}  // namespace qnoise
