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
#include <stdexcept>

#include "qnoise/sim.hpp"

namespace qnoise {

/// Cosine distance 1 - a.b/(|a||b|) over the union of bitstring keys
/// (missing keys contribute 0). Operates on raw counts; scale invariance
/// makes counts-vs-frequencies equivalent. Result clamped to [0, 1] against
/// rounding spill.
inline double cosine_distance(const OutcomeDistribution& a, const OutcomeDistribution& b) {
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    auto ia = a.counts.begin();
    auto ib = b.counts.begin();
    while (ia != a.counts.end() || ib != b.counts.end()) {
        if (ib == b.counts.end() || (ia != a.counts.end() && ia->first < ib->first)) {
            const double va = static_cast<double>(ia->second);
            na += va * va;
            ++ia;
        } else if (ia == a.counts.end() || ib->first < ia->first) {
            const double vb = static_cast<double>(ib->second);
            nb += vb * vb;
            ++ib;
        } else {
            const double va = static_cast<double>(ia->second);
            const double vb = static_cast<double>(ib->second);
            dot += va * vb;
            na += va * va;
            nb += vb * vb;
            ++ia;
            ++ib;
        }
    }
    if (na == 0.0 || nb == 0.0) {
        throw std::invalid_argument("cosine_distance: distribution with all-zero counts");
    }
    const double d = 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
    return d < 0.0 ? 0.0 : (d > 1.0 ? 1.0 : d);
}

}  // namespace qnoise
