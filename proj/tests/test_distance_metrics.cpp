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

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "qnoise/distance.hpp"
#include "qnoise/metrics.hpp"
#include "qnoise/text.hpp"

namespace {

using qnoise::cosine_distance;
using qnoise::OutcomeDistribution;

OutcomeDistribution dist(std::map<std::string, uint64_t> counts) {
    OutcomeDistribution d;
    d.counts = std::move(counts);
    for (const auto& [key, count] : d.counts) {
        d.shots += count;
    }
    return d;
}

TEST_CASE("identical distributions have distance 0", "[distance]") {
    const OutcomeDistribution a = dist({{"00", 500}, {"11", 500}});
    CHECK(std::abs(cosine_distance(a, a)) <= 1e-12);
}

TEST_CASE("orthogonal supports have distance 1", "[distance]") {
    const OutcomeDistribution a = dist({{"00", 1000}});
    const OutcomeDistribution b = dist({{"11", 1000}});
    CHECK(std::abs(cosine_distance(a, b) - 1.0) <= 1e-12);
}

TEST_CASE("hand-computed example: 1 - 24/25", "[distance]") {
    const OutcomeDistribution a = dist({{"00", 3}, {"11", 4}});
    const OutcomeDistribution b = dist({{"00", 4}, {"11", 3}});
    CHECK(std::abs(cosine_distance(a, b) - 0.04) <= 1e-12);
    CHECK(cosine_distance(a, b) == cosine_distance(b, a));
}

TEST_CASE("distance is scale invariant", "[distance]") {
    const OutcomeDistribution a = dist({{"00", 3}, {"01", 9}, {"10", 1}});
    const OutcomeDistribution b = dist({{"00", 2}, {"01", 5}, {"11", 4}});
    OutcomeDistribution a10;
    OutcomeDistribution b7;
    for (const auto& [key, count] : a.counts) {
        a10.counts[key] = count * 10;
    }
    for (const auto& [key, count] : b.counts) {
        b7.counts[key] = count * 7;
    }
    CHECK(std::abs(cosine_distance(a, b) - cosine_distance(a10, b7)) <= 1e-12);
}

TEST_CASE("missing keys count as zero", "[distance]") {
    // {"0": 1, "1": 1} vs {"0": 1}: cos = 1/sqrt(2).
    const OutcomeDistribution a = dist({{"0", 1}, {"1", 1}});
    const OutcomeDistribution b = dist({{"0", 1}});
    CHECK(cosine_distance(a, b) == Catch::Approx(1.0 - 1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("distance stays within [0, 1]", "[distance]") {
    const OutcomeDistribution a = dist({{"00", 7}, {"01", 1}, {"10", 3}, {"11", 2}});
    const OutcomeDistribution b = dist({{"00", 1}, {"01", 9}, {"10", 2}, {"11", 5}});
    const double d = cosine_distance(a, b);
    CHECK(d >= 0.0);
    CHECK(d <= 1.0);
}

TEST_CASE("all-zero distributions are rejected", "[distance]") {
    const OutcomeDistribution ok = dist({{"0", 5}});
    OutcomeDistribution empty;
    CHECK_THROWS_AS(cosine_distance(ok, empty), std::invalid_argument);
    CHECK_THROWS_AS(cosine_distance(empty, ok), std::invalid_argument);
    OutcomeDistribution zeros;
    zeros.counts["0"] = 0;
    zeros.counts["1"] = 0;
    CHECK_THROWS_AS(cosine_distance(ok, zeros), std::invalid_argument);
}

TEST_CASE("mae and rmse", "[metrics]") {
    const std::vector<double> preds = {1.0, 2.0, 3.0};
    const std::vector<double> labels = {1.5, 1.5, 4.0};
    CHECK(qnoise::mae(preds, labels) == Catch::Approx((0.5 + 0.5 + 1.0) / 3.0));
    CHECK(qnoise::rmse(preds, labels) ==
          Catch::Approx(std::sqrt((0.25 + 0.25 + 1.0) / 3.0)));
    CHECK(qnoise::mae(labels, labels) == 0.0);
    CHECK(qnoise::rmse(labels, labels) == 0.0);
    CHECK_THROWS_AS(qnoise::mae({}, {}), std::invalid_argument);
    CHECK_THROWS_AS(qnoise::mae({1.0}, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(qnoise::rmse({1.0}, {}), std::invalid_argument);
}

TEST_CASE("rmse dominates mae", "[metrics]") {
    const std::vector<double> preds = {0.1, 0.9, 0.4, 0.7};
    const std::vector<double> labels = {0.2, 0.3, 0.5, 0.1};
    CHECK(qnoise::rmse(preds, labels) >= qnoise::mae(preds, labels));
}

TEST_CASE("results csv row matches the pinned header", "[metrics]") {
    CHECK(std::string(qnoise::kResultsCsvHeader) ==
          "algorithm,preset,split_fraction,ablation,mae,rmse,fit_seconds,predict_seconds");
    qnoise::EvalReport r;
    r.algorithm = "linreg";
    r.preset = "preset-a";
    r.split_fraction = 0.8;
    r.ablation = "none";
    r.mae = 0.05;
    r.rmse = 0.0625;
    r.fit_seconds = 1.5;
    r.predict_seconds = 0.25;
    CHECK(qnoise::results_csv_row(r) ==
          "linreg,preset-a,0.80000000000000004,none,0.050000000000000003,0.0625,1.5,0.25");
}

TEST_CASE("stopwatch measures forward time", "[metrics]") {
    qnoise::Stopwatch w;
    volatile double sink = 0.0;
    for (int i = 0; i < 100000; ++i) {
        sink = sink + 1.0;
    }
    const double t = w.seconds();
    CHECK(t >= 0.0);
    CHECK(t < 60.0);
}

TEST_CASE("format_double17 round-trips doubles", "[text]") {
    for (double v : {0.1, 1.0 / 3.0, 6.2831853071795864769, 1e-300, 0.0}) {
        const std::string s = qnoise::format_double17(v);
        CHECK(std::stod(s) == v);
    }
}

}  // namespace
