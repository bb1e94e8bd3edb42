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

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "qnoise/text.hpp"

namespace qnoise {

inline double mae(const std::vector<double>& preds, const std::vector<double>& labels) {
    if (preds.empty() || preds.size() != labels.size()) {
        throw std::invalid_argument("mae: prediction/label lengths must match and be nonzero");
    }
    double acc = 0.0;
    for (size_t i = 0; i < preds.size(); ++i) {
        acc += std::abs(preds[i] - labels[i]);
    }
    return acc / static_cast<double>(preds.size());
}

inline double rmse(const std::vector<double>& preds, const std::vector<double>& labels) {
    if (preds.empty() || preds.size() != labels.size()) {
        throw std::invalid_argument("rmse: prediction/label lengths must match and be nonzero");
    }
    double acc = 0.0;
    for (size_t i = 0; i < preds.size(); ++i) {
        const double d = preds[i] - labels[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(preds.size()));
}

/// One results-table row. `ablation` is "none" or '+'-joined gate names.
struct EvalReport {
    std::string algorithm;
    std::string preset;
    double split_fraction = 0.0;
    std::string ablation = "none";
    double mae = 0.0;
    double rmse = 0.0;
    double fit_seconds = 0.0;
    double predict_seconds = 0.0;
};

inline constexpr const char* kResultsCsvHeader =
    "algorithm,preset,split_fraction,ablation,mae,rmse,fit_seconds,predict_seconds";

inline std::string results_csv_row(const EvalReport& r) {
    return r.algorithm + ',' + r.preset + ',' + format_double17(r.split_fraction) + ',' +
           r.ablation + ',' + format_double17(r.mae) + ',' + format_double17(r.rmse) + ',' +
           format_double17(r.fit_seconds) + ',' + format_double17(r.predict_seconds);
}

/// Wall-clock stopwatch for fit/predict timings.
class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}

    double seconds() const {
        const auto now = std::chrono::steady_clock::now();
        return std::chrono::duration<double>(now - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

}  // namespace qnoise
