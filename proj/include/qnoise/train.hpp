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
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "qnoise/dataset.hpp"
#include "qnoise/features.hpp"
#include "qnoise/gates.hpp"
#include "qnoise/matrix.hpp"
#include "qnoise/metrics.hpp"
#include "qnoise/model_io.hpp"

namespace qnoise {

struct TrainOptions {
    std::string algorithm = "linreg";
    double train_fraction = 0.8;
    uint64_t seed = 0;  // split shuffle; the nn stream is splitmix64(seed ^ 1)
    std::set<std::string> ablate;
    GbdtConfig gbdt;  // gbdt-* runs; the mode is forced from the algorithm
    NnConfig nn;      // nn-* runs
};

struct TrainResult {
    ModelFile model;
    EvalReport report;
    std::vector<size_t> train_indices;
    std::vector<size_t> test_indices;
    std::vector<double> test_predictions;
};

inline std::string ablation_label(const std::set<std::string>& ablate) {
    if (ablate.empty()) {
        return "none";
    }
    std::string out;
    for (const std::string& name : ablate) {
        if (!out.empty()) {
            out += '+';
        }
        out += name;
    }
    return out;
}

namespace internal {

/// Design matrix over the stored gate-count maps. Featurization problems are
/// data errors (bad dataset file), reported with the offending record id.
inline Matrix count_matrix(const std::vector<LabeledRecord>& records,
                           const GateVocabulary& vocabulary,
                           const std::set<std::string>& ablate) {
    const std::vector<std::string> schema = feature_schema(vocabulary, ablate);
    Matrix x(records.size(), schema.size());
    for (size_t r = 0; r < records.size(); ++r) {
        try {
            const FeatureVector fv = featurize_from_counts(records[r].gate_counts, vocabulary,
                                                           ablate);
            for (size_t c = 0; c < fv.values.size(); ++c) {
                x.at(r, c) = fv.values[c];
            }
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error("record '" + records[r].circuit_id + "': " + e.what());
        }
    }
    return x;
}

/// Token grids for the nn models; every record must have its circuit in
/// `circuits_by_id` (grids cannot be rebuilt from gate counts alone).
inline std::vector<TokenGrid> record_grids(const std::vector<LabeledRecord>& records,
                                           const std::map<std::string, Circuit>& circuits_by_id,
                                           const GateVocabulary& vocabulary) {
    std::vector<TokenGrid> grids;
    grids.reserve(records.size());
    for (const LabeledRecord& r : records) {
        const auto it = circuits_by_id.find(r.circuit_id);
        if (it == circuits_by_id.end()) {
            throw std::runtime_error("record '" + r.circuit_id +
                                     "': no circuit with this id was provided");
        }
        if (it->second.num_qubits != r.num_qubits) {
            throw std::runtime_error("record '" + r.circuit_id + "': dataset says " +
                                     std::to_string(r.num_qubits) + " qubits but the circuit has " +
                                     std::to_string(it->second.num_qubits));
        }
        try {
            grids.push_back(tokenize_grid(it->second, vocabulary));
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error("record '" + r.circuit_id + "': " + e.what());
        }
    }
    return grids;
}

inline Matrix select_rows(const Matrix& x, const std::vector<size_t>& rows) {
    Matrix out(rows.size(), x.cols);
    for (size_t i = 0; i < rows.size(); ++i) {
        for (size_t c = 0; c < x.cols; ++c) {
            out.at(i, c) = x.at(rows[i], c);
        }
    }
    return out;
}

template <typename T>
std::vector<T> select(const std::vector<T>& values, const std::vector<size_t>& rows) {
    std::vector<T> out;
    out.reserve(rows.size());
    for (size_t r : rows) {
        out.push_back(values[r]);
    }
    return out;
}

}  // namespace internal

/// Splits the records, fits the requested model on the training side, and
/// evaluates MAE/RMSE on the held-out side. Fit/predict timings cover the
/// model work only (featurization is shared across algorithms).
///
/// `circuits_by_id` is required for the nn models (their input is the token
/// grid, which gate counts cannot reproduce); tabular runs ignore it.
inline TrainResult train_and_evaluate(const std::vector<LabeledRecord>& records,
                                      const std::map<std::string, Circuit>& circuits_by_id,
                                      const TrainOptions& options,
                                      const GateVocabulary& vocabulary = default_vocabulary()) {
    if (!is_model_algorithm(options.algorithm)) {
        throw std::invalid_argument("unknown algorithm '" + options.algorithm +
                                    "' (valid: linreg, gbdt-hist, gbdt-newton, nn-dense, "
                                    "nn-cnn)");
    }
    const bool is_nn = is_nn_algorithm(options.algorithm);
    if (is_nn && !options.ablate.empty()) {
        throw std::invalid_argument(
            "ablation applies to the count-feature models only; nn models consume the full "
            "token grid");
    }
    if (records.empty()) {
        throw std::invalid_argument("no records to train on");
    }
    for (const LabeledRecord& r : records) {
        if (r.preset != records.front().preset) {
            throw std::runtime_error("records mix presets '" + records.front().preset +
                                     "' and '" + r.preset + "'; train on one preset at a time");
        }
    }

    TrainResult result;
    auto [train_idx, test_idx] =
        split_indices(records.size(), SplitSpec{options.train_fraction, options.seed});
    result.train_indices = std::move(train_idx);
    result.test_indices = std::move(test_idx);

    std::vector<double> labels(records.size());
    for (size_t i = 0; i < records.size(); ++i) {
        labels[i] = records[i].label;
    }
    const std::vector<double> y_train = internal::select(labels, result.train_indices);
    const std::vector<double> y_test = internal::select(labels, result.test_indices);

    result.model.algorithm = options.algorithm;
    result.model.vocabulary = vocabulary.names();
    result.model.ablate.assign(options.ablate.begin(), options.ablate.end());
    result.model.preset = records.front().preset;

    double fit_seconds = 0.0;
    double predict_seconds = 0.0;
    if (is_nn) {
        const std::vector<TokenGrid> grids =
            internal::record_grids(records, circuits_by_id, vocabulary);
        const std::vector<TokenGrid> g_train = internal::select(grids, result.train_indices);
        const std::vector<TokenGrid> g_test = internal::select(grids, result.test_indices);
        const NnArch arch = options.algorithm == "nn-dense" ? NnArch::Dense : NnArch::Cnn;
        result.model.nn.configure(arch, options.nn, static_cast<int>(vocabulary.size()));
        {
            Stopwatch watch;
            result.model.nn.fit(g_train, y_train, splitmix64(options.seed ^ 1));
            fit_seconds = watch.seconds();
        }
        {
            Stopwatch watch;
            result.test_predictions = result.model.nn.predict(g_test);
            predict_seconds = watch.seconds();
        }
    } else {
        const Matrix x = internal::count_matrix(records, vocabulary, options.ablate);
        const Matrix x_train = internal::select_rows(x, result.train_indices);
        const Matrix x_test = internal::select_rows(x, result.test_indices);
        if (options.algorithm == "linreg") {
            Stopwatch watch;
            result.model.linear.fit(x_train, y_train);
            fit_seconds = watch.seconds();
            Stopwatch pwatch;
            result.test_predictions = result.model.linear.predict(x_test);
            predict_seconds = pwatch.seconds();
        } else {
            GbdtConfig config = options.gbdt;
            config.mode = options.algorithm == "gbdt-hist" ? GbdtMode::HistFirstOrder
                                                           : GbdtMode::Newton;
            Stopwatch watch;
            result.model.gbdt.fit(x_train, y_train, config);
            fit_seconds = watch.seconds();
            Stopwatch pwatch;
            result.test_predictions = result.model.gbdt.predict(x_test);
            predict_seconds = pwatch.seconds();
        }
    }

    result.report.algorithm = options.algorithm;
    result.report.preset = result.model.preset;
    result.report.split_fraction = options.train_fraction;
    result.report.ablation = ablation_label(options.ablate);
    result.report.mae = mae(result.test_predictions, y_test);
    result.report.rmse = rmse(result.test_predictions, y_test);
    result.report.fit_seconds = fit_seconds;
    result.report.predict_seconds = predict_seconds;
    return result;
}

/// Applies a loaded model to circuits, in input order. The model must have
/// been trained against this build's gate vocabulary; the error names both
/// schemas when they differ.
inline std::vector<double> predict_circuits(const ModelFile& model,
                                            const std::vector<Circuit>& circuits,
                                            const GateVocabulary& vocabulary =
                                                default_vocabulary()) {
    if (model.vocabulary != vocabulary.names()) {
        const auto join = [](const std::vector<std::string>& names) {
            std::string out;
            for (const std::string& n : names) {
                if (!out.empty()) {
                    out += ',';
                }
                out += n;
            }
            return out;
        };
        throw std::invalid_argument("model feature schema [" + join(model.vocabulary) +
                                    "] does not match this build's vocabulary [" +
                                    join(vocabulary.names()) + "]");
    }
    if (is_nn_algorithm(model.algorithm)) {
        std::vector<TokenGrid> grids;
        grids.reserve(circuits.size());
        for (const Circuit& c : circuits) {
            grids.push_back(tokenize_grid(c, vocabulary));
        }
        return model.nn.predict(grids);
    }
    const std::set<std::string> ablate(model.ablate.begin(), model.ablate.end());
    const std::vector<std::string> schema = feature_schema(vocabulary, ablate);
    Matrix x(circuits.size(), schema.size());
    for (size_t r = 0; r < circuits.size(); ++r) {
        const FeatureVector fv = featurize_counts(circuits[r], vocabulary, ablate);
        for (size_t c = 0; c < fv.values.size(); ++c) {
            x.at(r, c) = fv.values[c];
        }
    }
    if (model.algorithm == "linreg") {
        return model.linear.predict(x);
    }
    return model.gbdt.predict(x);
}

/// One bench repetition: wall-clock of a fresh fit on the full dataset and
/// of predicting every row with the loaded model.
struct BenchTiming {
    double fit_seconds = 0.0;
    double predict_seconds = 0.0;
};

/// Refits the model's algorithm/configuration on all records and times
/// predictions over all circuits, repetitions times. The loaded model serves
/// prediction; fitting starts fresh each repetition.
inline std::vector<BenchTiming> bench_model(const ModelFile& model,
                                            const std::vector<LabeledRecord>& records,
                                            const std::map<std::string, Circuit>& circuits_by_id,
                                            int repetitions,
                                            const GateVocabulary& vocabulary =
                                                default_vocabulary()) {
    if (repetitions < 1) {
        throw std::invalid_argument("bench: repetitions must be >= 1");
    }
    if (records.empty()) {
        throw std::invalid_argument("bench: no records");
    }
    if (model.vocabulary != vocabulary.names()) {
        throw std::invalid_argument(
            "model was trained against a different gate vocabulary than this build");
    }
    std::vector<double> labels(records.size());
    for (size_t i = 0; i < records.size(); ++i) {
        labels[i] = records[i].label;
    }
    const std::set<std::string> ablate(model.ablate.begin(), model.ablate.end());
    const bool is_nn = is_nn_algorithm(model.algorithm);
    std::vector<TokenGrid> grids;
    Matrix x;
    if (is_nn) {
        grids = internal::record_grids(records, circuits_by_id, vocabulary);
    } else {
        x = internal::count_matrix(records, vocabulary, ablate);
    }
    std::vector<BenchTiming> out;
    out.reserve(static_cast<size_t>(repetitions));
    for (int rep = 0; rep < repetitions; ++rep) {
        BenchTiming t;
        if (is_nn) {
            NnRegressor fresh;
            Stopwatch fit_watch;
            fresh.configure(model.nn.arch(), model.nn.config(), model.nn.vocab_size());
            fresh.fit(grids, labels, splitmix64(static_cast<uint64_t>(rep) ^ 1));
            t.fit_seconds = fit_watch.seconds();
            Stopwatch predict_watch;
            model.nn.predict(grids);
            t.predict_seconds = predict_watch.seconds();
        } else if (model.algorithm == "linreg") {
            LinearModel fresh;
            Stopwatch fit_watch;
            fresh.fit(x, labels);
            t.fit_seconds = fit_watch.seconds();
            Stopwatch predict_watch;
            model.linear.predict(x);
            t.predict_seconds = predict_watch.seconds();
        } else {
            GbdtModel fresh;
            Stopwatch fit_watch;
            fresh.fit(x, labels, model.gbdt.config());
            t.fit_seconds = fit_watch.seconds();
            Stopwatch predict_watch;
            model.gbdt.predict(x);
            t.predict_seconds = predict_watch.seconds();
        }
        out.push_back(t);
    }
    return out;
}

}  // namespace qnoise
