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
#include <vector>

namespace qnoise {

/// SplitMix64 (Vigna's reference constants). Returns the first output of a
/// SplitMix64 stream whose state word is `x`. Used throughout for deriving
/// independent sub-seeds: child_seed = splitmix64(parent_seed ^ index).
constexpr uint64_t splitmix64(uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// xoshiro256** 1.0 (Blackman/Vigna), seeded by expanding the 64-bit seed with
/// four successive SplitMix64 outputs, as the authors recommend. All random
/// draws in this library come from this generator so that results are
/// reproducible bit-for-bit across platforms and parallel schedules.
class Xoshiro256StarStar {
public:
    explicit Xoshiro256StarStar(uint64_t seed) noexcept {
        uint64_t sm = seed;
        for (auto& word : state_) {
            sm += 0x9E3779B97F4A7C15ULL;
            uint64_t z = sm;
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
            word = z ^ (z >> 31);
        }
    }

    uint64_t next() noexcept {
        const uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1), from the top 53 bits.
    double uniform01() noexcept {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound). Fixed-point multiply-shift reduction
    /// (no rejection), so the draw count per call is always exactly one.
    uint64_t below(uint64_t bound) noexcept {
        return static_cast<uint64_t>(
            (static_cast<unsigned __int128>(next()) * bound) >> 64);
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) noexcept {
        return lo + (hi - lo) * uniform01();
    }

    /// In-place Fisher-Yates shuffle (descending index order).
    template <typename T>
    void shuffle(std::vector<T>& values) noexcept {
        for (size_t i = values.size(); i > 1; --i) {
            const size_t j = static_cast<size_t>(below(i));
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    static constexpr uint64_t rotl(uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    uint64_t state_[4];
};

}  // namespace qnoise
