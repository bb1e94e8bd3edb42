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

// qnoise command-line interface.
//
// Subcommands: generate, label, train, predict, bench, report. Options come
// from flags and an optional JSON config file (--config); explicit flags win
// over config values, which win over defaults. Every data-producing command
// writes a <command>.manifest.json beside its outputs recording the exact
// effective settings (no timestamps), so reruns are reproducible.
//
// Exit codes: 0 success, 2 usage/config error, 3 data error (unreadable or
// malformed inputs), 4 numeric failure.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qnoise/qnoise.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

/// Bad flag/config values detected after CLI11 parsing.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parsed --config JSON. Lookup order for a key of subcommand `section`:
/// config[section][key], then top-level config[key] (scalars/arrays only, so
/// a subcommand section is never mistaken for a value).
struct AppConfig {
    nlohmann::json root = nlohmann::json::object();

    void load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            throw UsageError("cannot open config file '" + path + "'");
        }
        try {
            root = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw UsageError("config file '" + path + "' is not valid JSON: " + e.what());
        }
        if (!root.is_object()) {
            throw UsageError("config file '" + path + "' must hold a JSON object");
        }
    }

    const nlohmann::json* find(const std::string& section, const std::string& key) const {
        const auto s = root.find(section);
        if (s != root.end() && s->is_object()) {
            const auto v = s->find(key);
            if (v != s->end()) {
                return &*v;
            }
        }
        const auto v = root.find(key);
        if (v != root.end() && !v->is_object()) {
            return &*v;
        }
        return nullptr;
    }

    template <typename T>
    void merge(const CLI::Option* opt, const std::string& section, const std::string& key,
               T& value) const {
        if (opt != nullptr && opt->count() > 0) {
            return;  // explicit flag wins
        }
        const nlohmann::json* j = find(section, key);
        if (j == nullptr) {
            return;
        }
        try {
            value = j->get<T>();
        } catch (const nlohmann::json::exception& e) {
            throw UsageError("config key '" + section + "." + key + "': " + e.what());
        }
    }
};

/// Options shared by every subcommand. Registered per subcommand so that
/// `qnoise <sub> --seed 7` works without fallthrough tricks.
struct GlobalOptions {
    std::string config_path;
    uint64_t seed = 0;
    int parallelism = 1;
    std::string out_dir = ".";

    CLI::Option* config_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* parallelism_opt = nullptr;
    CLI::Option* out_dir_opt = nullptr;

    void attach(CLI::App* cmd) {
        config_opt = cmd->add_option("--config", config_path,
                                     "JSON config file; explicit flags override its values");
        seed_opt = cmd->add_option("--seed", seed, "master random seed (default 0)");
        parallelism_opt =
            cmd->add_option("--parallelism", parallelism, "worker threads (default 1)");
        out_dir_opt = cmd->add_option("--out-dir", out_dir,
                                      "directory for outputs and manifests (default .)");
    }

    AppConfig resolve(const std::string& section) {
        AppConfig cfg;
        if (!config_path.empty()) {
            cfg.load(config_path);
        }
        cfg.merge(seed_opt, section, "seed", seed);
        cfg.merge(parallelism_opt, section, "parallelism", parallelism);
        cfg.merge(out_dir_opt, section, "out_dir", out_dir);
        if (parallelism < 1) {
            throw UsageError("--parallelism must be >= 1");
        }
        return cfg;
    }
};

std::string joined_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

/// Default output paths live in --out-dir; explicitly given paths are used
/// verbatim.
std::string resolve_output(const CLI::Option* opt, const AppConfig& cfg,
                           const std::string& section, const std::string& key,
                           std::string value, const std::string& out_dir,
                           const std::string& default_name) {
    if ((opt == nullptr || opt->count() == 0) && cfg.find(section, key) != nullptr) {
        cfg.merge(nullptr, section, key, value);
        return value;
    }
    if (opt != nullptr && opt->count() > 0) {
        return value;
    }
    return joined_path(out_dir, default_name);
}

void write_manifest(const std::string& out_dir, const std::string& command,
                    const nlohmann::json& settings, const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs) {
    nlohmann::json m;
    m["format_version"] = 1;
    m["command"] = command;
    m["settings"] = settings;
    m["inputs"] = inputs;
    m["outputs"] = outputs;
    const std::string path = joined_path(out_dir, command + ".manifest.json");
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    out << m.dump(2) << '\n';
    if (!out) {
        throw std::runtime_error("failed writing '" + path + "'");
    }
}

/// Inputs the user points at must exist; a missing path is a usage error
/// (exit 2), while unreadable content is a data error (exit 3).
std::ifstream open_input(const std::string& path, const std::string& what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw UsageError("cannot open " + what + " file '" + path + "'");
    }
    return in;
}

std::vector<qnoise::Circuit> load_circuits(const std::string& path) {
    std::ifstream in = open_input(path, "circuits");
    return qnoise::read_circuits(in);
}

std::vector<qnoise::LabeledRecord> load_records(const std::string& path) {
    std::ifstream in = open_input(path, "dataset");
    return qnoise::read_records(in);
}

qnoise::ModelFile load_model(const std::string& path) {
    open_input(path, "model");  // missing model file is a usage error
    return qnoise::read_model(path);
}

std::map<std::string, qnoise::Circuit> circuits_by_id(std::vector<qnoise::Circuit> circuits) {
    std::map<std::string, qnoise::Circuit> out;
    for (qnoise::Circuit& c : circuits) {
        const std::string id = c.id;
        if (!out.emplace(id, std::move(c)).second) {
            throw std::runtime_error("duplicate circuit id '" + id + "'");
        }
    }
    return out;
}

void merge_gbdt_config(const AppConfig& cfg, const std::string& section,
                       qnoise::GbdtConfig& g) {
    const nlohmann::json* j = cfg.find(section, "gbdt");
    if (j == nullptr) {
        return;
    }
    if (!j->is_object()) {
        throw UsageError("config key '" + section + ".gbdt' must be an object");
    }
    try {
        for (const auto& [key, value] : j->items()) {
            if (key == "iterations") {
                g.iterations = value.get<int>();
            } else if (key == "learning_rate") {
                g.learning_rate = value.get<double>();
            } else if (key == "max_leaves") {
                g.max_leaves = value.get<int>();
            } else if (key == "max_depth") {
                g.max_depth = value.get<int>();
            } else if (key == "max_bins") {
                g.max_bins = value.get<int>();
            } else if (key == "min_samples_leaf") {
                g.min_samples_leaf = value.get<int>();
            } else if (key == "l2_reg") {
                g.l2_reg = value.get<double>();
            } else {
                throw UsageError("unknown gbdt config key '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("config section '" + section + ".gbdt': " + e.what());
    }
}

void merge_nn_config(const AppConfig& cfg, const std::string& section, qnoise::NnConfig& n) {
    const nlohmann::json* j = cfg.find(section, "nn");
    if (j == nullptr) {
        return;
    }
    if (!j->is_object()) {
        throw UsageError("config key '" + section + ".nn' must be an object");
    }
    try {
        for (const auto& [key, value] : j->items()) {
            if (key == "embed_dim") {
                n.embed_dim = value.get<int>();
            } else if (key == "hidden1") {
                n.hidden1 = value.get<int>();
            } else if (key == "hidden2") {
                n.hidden2 = value.get<int>();
            } else if (key == "conv_channels") {
                n.conv_channels = value.get<int>();
            } else if (key == "epochs") {
                n.epochs = value.get<int>();
            } else if (key == "batch_size") {
                n.batch_size = value.get<int>();
            } else if (key == "lr0") {
                n.lr0 = value.get<double>();
            } else if (key == "beta1") {
                n.beta1 = value.get<double>();
            } else if (key == "beta2") {
                n.beta2 = value.get<double>();
            } else if (key == "epsilon") {
                n.epsilon = value.get<double>();
            } else {
                throw UsageError("unknown nn config key '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("config section '" + section + ".nn': " + e.what());
    }
}

/// Custom noise model from config (label.noise). Returns true if present.
bool merge_noise_config(const AppConfig& cfg, qnoise::NoiseModel& noise) {
    const nlohmann::json* j = cfg.find("label", "noise");
    if (j == nullptr) {
        return false;
    }
    if (!j->is_object()) {
        throw UsageError("config key 'label.noise' must be an object");
    }
    try {
        for (const auto& [key, value] : j->items()) {
            if (key == "p1") {
                noise.p1 = value.get<double>();
            } else if (key == "p2") {
                noise.p2 = value.get<double>();
            } else if (key == "p_ro") {
                noise.p_ro = value.get<double>();
            } else if (key == "p_reset") {
                noise.p_reset = value.get<double>();
            } else if (key == "overrides") {
                for (const auto& [name, rate] : value.items()) {
                    noise.overrides[name] = rate.get<double>();
                }
            } else {
                throw UsageError("unknown noise config key '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("config section 'label.noise': ") + e.what());
    }
    return true;
}

nlohmann::json noise_settings(const qnoise::NoiseModel& noise) {
    nlohmann::json j;
    j["p1"] = noise.p1;
    j["p2"] = noise.p2;
    j["p_ro"] = noise.p_ro;
    j["p_reset"] = noise.p_reset;
    if (!noise.overrides.empty()) {
        j["overrides"] = noise.overrides;
    }
    return j;
}

/// Appends a results row, writing the header first when the file is new or
/// empty.
void append_results_row(const std::string& path, const qnoise::EvalReport& report) {
    bool needs_header = true;
    {
        std::ifstream probe(path, std::ios::binary);
        if (probe && probe.peek() != std::ifstream::traits_type::eof()) {
            needs_header = false;
        }
    }
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    if (needs_header) {
        out << qnoise::kResultsCsvHeader << '\n';
    }
    out << qnoise::results_csv_row(report) << '\n';
    if (!out) {
        throw std::runtime_error("failed writing '" + path + "'");
    }
}

// ---------------------------------------------------------------------------
// generate

struct GenerateCmd {
    GlobalOptions global;
    int64_t count = -1;  // -1 → the full corpus
    int per_qubit_count = 5000;
    int qubit_lo = 4;
    int qubit_hi = 10;
    int depth_lo = 2;
    int depth_hi = 50;
    std::string out;

    CLI::Option* count_opt = nullptr;
    CLI::Option* per_qubit_opt = nullptr;
    CLI::Option* qubit_lo_opt = nullptr;
    CLI::Option* qubit_hi_opt = nullptr;
    CLI::Option* depth_lo_opt = nullptr;
    CLI::Option* depth_hi_opt = nullptr;
    CLI::Option* out_opt = nullptr;

    void attach(CLI::App* cmd) {
        global.attach(cmd);
        count_opt = cmd->add_option("--count", count,
                                    "number of circuits (a prefix of the corpus enumeration; "
                                    "default: the full corpus)");
        per_qubit_opt = cmd->add_option("--per-qubit-count", per_qubit_count,
                                        "circuits per qubit width (default 5000)");
        qubit_lo_opt = cmd->add_option("--qubit-lo", qubit_lo, "smallest width (default 4)");
        qubit_hi_opt = cmd->add_option("--qubit-hi", qubit_hi, "largest width (default 10)");
        depth_lo_opt = cmd->add_option("--depth-lo", depth_lo, "smallest depth (default 2)");
        depth_hi_opt = cmd->add_option("--depth-hi", depth_hi, "largest depth (default 50)");
        out_opt = cmd->add_option("--out", out, "output file (default <out-dir>/circuits.jsonl)");
    }

    void run() {
        AppConfig cfg = global.resolve("generate");
        cfg.merge(count_opt, "generate", "count", count);
        cfg.merge(per_qubit_opt, "generate", "per_qubit_count", per_qubit_count);
        cfg.merge(qubit_lo_opt, "generate", "qubit_lo", qubit_lo);
        cfg.merge(qubit_hi_opt, "generate", "qubit_hi", qubit_hi);
        cfg.merge(depth_lo_opt, "generate", "depth_lo", depth_lo);
        cfg.merge(depth_hi_opt, "generate", "depth_hi", depth_hi);
        out = resolve_output(out_opt, cfg, "generate", "out", out, global.out_dir,
                             "circuits.jsonl");

        qnoise::CorpusSpec spec;
        spec.master_seed = global.seed;
        spec.per_qubit_count = per_qubit_count;
        spec.qubit_lo = qubit_lo;
        spec.qubit_hi = qubit_hi;
        spec.depth_lo = depth_lo;
        spec.depth_hi = depth_hi;
        try {
            qnoise::validate_corpus_spec(spec);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        const int64_t total = count < 0 ? spec.total_count() : count;
        if (total < 1 || total > spec.total_count()) {
            throw UsageError("--count must be in 1.." + std::to_string(spec.total_count()));
        }

        std::filesystem::create_directories(global.out_dir);
        std::ofstream file(out, std::ios::binary);
        if (!file) {
            throw std::runtime_error("cannot open '" + out + "' for writing");
        }
        for (int64_t i = 0; i < total; ++i) {
            file << qnoise::serialize_circuit(qnoise::corpus_circuit(spec, i)) << '\n';
            if ((i + 1) % 1000 == 0) {
                std::cerr << "qnoise: generated " << (i + 1) << "/" << total << " circuits\n";
            }
        }
        if (!file) {
            throw std::runtime_error("failed writing '" + out + "'");
        }
        std::cerr << "qnoise: wrote " << total << " circuits to " << out << "\n";

        nlohmann::json settings;
        settings["seed"] = global.seed;
        settings["count"] = total;
        settings["per_qubit_count"] = per_qubit_count;
        settings["qubit_lo"] = qubit_lo;
        settings["qubit_hi"] = qubit_hi;
        settings["depth_lo"] = depth_lo;
        settings["depth_hi"] = depth_hi;
        write_manifest(global.out_dir, "generate", settings, {}, {out});
    }
};

// ---------------------------------------------------------------------------
// label

struct LabelCmd {
    GlobalOptions global;
    std::string circuits_path;
    std::string preset = "preset-a";
    uint64_t shots = 1000;
    std::string out;

    CLI::Option* circuits_opt = nullptr;
    CLI::Option* preset_opt = nullptr;
    CLI::Option* shots_opt = nullptr;
    CLI::Option* out_opt = nullptr;

    void attach(CLI::App* cmd) {
        global.attach(cmd);
        circuits_opt = cmd->add_option("--circuits", circuits_path,
                                       "input circuits (default <out-dir>/circuits.jsonl)");
        preset_opt = cmd->add_option("--preset", preset,
                                     "noise preset: preset-a or preset-b (default preset-a); a "
                                     "'label.noise' config section defines a custom model");
        shots_opt = cmd->add_option("--shots", shots, "shots per run (default 1000)");
        out_opt = cmd->add_option("--out", out, "output file (default <out-dir>/dataset.jsonl)");
    }

    void run() {
        AppConfig cfg = global.resolve("label");
        cfg.merge(preset_opt, "label", "preset", preset);
        cfg.merge(shots_opt, "label", "shots", shots);
        if ((circuits_opt == nullptr || circuits_opt->count() == 0) &&
            cfg.find("label", "circuits") != nullptr) {
            cfg.merge(nullptr, "label", "circuits", circuits_path);
        } else if (circuits_opt->count() == 0) {
            circuits_path = joined_path(global.out_dir, "circuits.jsonl");
        }
        out = resolve_output(out_opt, cfg, "label", "out", out, global.out_dir,
                             "dataset.jsonl");
        if (shots < 1) {
            throw UsageError("--shots must be >= 1");
        }

        qnoise::NoiseModel noise;
        std::string preset_name = preset;
        const bool custom = merge_noise_config(cfg, noise);
        const bool preset_explicit = preset_opt->count() > 0 ||
                                     cfg.find("label", "preset") != nullptr;
        if (custom && !preset_explicit) {
            preset_name = "custom";
        } else {
            try {
                noise = qnoise::noise_preset(preset_name);
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
        }
        try {
            qnoise::validate_noise_model(noise);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }

        const std::vector<qnoise::Circuit> circuits = load_circuits(circuits_path);
        if (circuits.empty()) {
            throw std::runtime_error("circuits file '" + circuits_path + "' holds no circuits");
        }
        const int64_t total = static_cast<int64_t>(circuits.size());
        const std::vector<qnoise::LabeledRecord> records = qnoise::build_dataset(
            circuits, noise, preset_name, shots, global.seed, global.parallelism,
            [total](int64_t done) {
                std::cerr << "qnoise: labeled " << done << "/" << total << " circuits\n";
            });

        std::filesystem::create_directories(global.out_dir);
        std::ofstream file(out, std::ios::binary);
        if (!file) {
            throw std::runtime_error("cannot open '" + out + "' for writing");
        }
        qnoise::write_records(file, records);
        if (!file) {
            throw std::runtime_error("failed writing '" + out + "'");
        }
        std::cerr << "qnoise: wrote " << records.size() << " records to " << out << "\n";

        nlohmann::json settings;
        settings["seed"] = global.seed;
        settings["parallelism"] = global.parallelism;
        settings["preset"] = preset_name;
        settings["shots"] = shots;
        settings["noise"] = noise_settings(noise);
        write_manifest(global.out_dir, "label", settings, {circuits_path}, {out});
    }
};

// ---------------------------------------------------------------------------
// train

struct TrainCmd {
    GlobalOptions global;
    std::string data_path;
    std::string circuits_path;
    std::string algorithm = "linreg";
    double train_fraction = 0.8;
    std::vector<std::string> ablate;
    int iterations = -1;  // gbdt override
    int epochs = -1;      // nn override
    std::string model_out;
    std::string results_path;

    CLI::Option* data_opt = nullptr;
    CLI::Option* circuits_opt = nullptr;
    CLI::Option* algorithm_opt = nullptr;
    CLI::Option* fraction_opt = nullptr;
    CLI::Option* ablate_opt = nullptr;
    CLI::Option* iterations_opt = nullptr;
    CLI::Option* epochs_opt = nullptr;
    CLI::Option* model_out_opt = nullptr;
    CLI::Option* results_opt = nullptr;

    void attach(CLI::App* cmd) {
        global.attach(cmd);
        data_opt = cmd->add_option("--data", data_path,
                                   "labeled dataset (default <out-dir>/dataset.jsonl)");
        circuits_opt = cmd->add_option("--circuits", circuits_path,
                                       "circuits file (required for nn-dense/nn-cnn, which "
                                       "consume token grids rather than gate counts)");
        algorithm_opt = cmd->add_option(
            "--algorithm", algorithm,
            "linreg, gbdt-hist, gbdt-newton, nn-dense, or nn-cnn (default linreg)");
        fraction_opt = cmd->add_option("--train-fraction", train_fraction,
                                       "training split fraction (default 0.8)");
        ablate_opt = cmd->add_option("--ablate", ablate,
                                     "gate names to drop from the count features "
                                     "(comma-separated; tabular models only)")
                         ->delimiter(',');
        iterations_opt =
            cmd->add_option("--iterations", iterations, "gbdt boosting iterations override");
        epochs_opt = cmd->add_option("--epochs", epochs, "nn training epochs override");
        model_out_opt = cmd->add_option(
            "--model-out", model_out, "model file (default <out-dir>/model-<algorithm>.json)");
        results_opt = cmd->add_option(
            "--results", results_path,
            "results CSV to append to (default <out-dir>/results.csv)");
    }

    void run() {
        AppConfig cfg = global.resolve("train");
        cfg.merge(algorithm_opt, "train", "algorithm", algorithm);
        cfg.merge(fraction_opt, "train", "train_fraction", train_fraction);
        cfg.merge(ablate_opt, "train", "ablate", ablate);
        if ((data_opt == nullptr || data_opt->count() == 0) &&
            cfg.find("train", "data") != nullptr) {
            cfg.merge(nullptr, "train", "data", data_path);
        } else if (data_opt->count() == 0) {
            data_path = joined_path(global.out_dir, "dataset.jsonl");
        }
        if (circuits_opt->count() == 0 && cfg.find("train", "circuits") != nullptr) {
            cfg.merge(nullptr, "train", "circuits", circuits_path);
        }
        if (!qnoise::is_model_algorithm(algorithm)) {
            throw UsageError("unknown algorithm '" + algorithm +
                             "' (valid: linreg, gbdt-hist, gbdt-newton, nn-dense, nn-cnn)");
        }
        model_out = resolve_output(model_out_opt, cfg, "train", "model_out", model_out,
                                   global.out_dir, "model-" + algorithm + ".json");
        results_path = resolve_output(results_opt, cfg, "train", "results", results_path,
                                      global.out_dir, "results.csv");

        qnoise::TrainOptions options;
        options.algorithm = algorithm;
        options.train_fraction = train_fraction;
        options.seed = global.seed;
        options.ablate.insert(ablate.begin(), ablate.end());
        options.gbdt = qnoise::gbdt_default_config(algorithm == "gbdt-newton"
                                                       ? qnoise::GbdtMode::Newton
                                                       : qnoise::GbdtMode::HistFirstOrder);
        merge_gbdt_config(cfg, "train", options.gbdt);
        if (iterations_opt->count() > 0) {
            options.gbdt.iterations = iterations;
        }
        merge_nn_config(cfg, "train", options.nn);
        if (epochs_opt->count() > 0) {
            options.nn.epochs = epochs;
        }

        const bool is_nn = qnoise::is_nn_algorithm(algorithm);
        if (is_nn && !options.ablate.empty()) {
            throw UsageError(
                "--ablate applies to the count-feature models only; nn models consume the "
                "full token grid");
        }
        if (is_nn && circuits_path.empty()) {
            throw UsageError("--circuits is required for " + algorithm +
                             " (token grids cannot be rebuilt from the dataset's gate counts)");
        }

        const std::vector<qnoise::LabeledRecord> records = load_records(data_path);
        std::map<std::string, qnoise::Circuit> circuits;
        if (is_nn) {
            circuits = circuits_by_id(load_circuits(circuits_path));
        }
        std::cerr << "qnoise: training " << algorithm << " on " << records.size()
                  << " records\n";
        const qnoise::TrainResult result = qnoise::train_and_evaluate(records, circuits,
                                                                      options);

        std::filesystem::create_directories(global.out_dir);
        qnoise::ModelFile model = result.model;
        qnoise::write_model(model_out, model);
        append_results_row(results_path, result.report);
        std::cout << algorithm << " preset=" << result.report.preset
                  << " split=" << train_fraction
                  << " ablation=" << result.report.ablation
                  << " mae=" << qnoise::format_double17(result.report.mae)
                  << " rmse=" << qnoise::format_double17(result.report.rmse) << "\n";
        std::cerr << "qnoise: wrote model to " << model_out << " and results row to "
                  << results_path << "\n";

        nlohmann::json settings;
        settings["seed"] = global.seed;
        settings["algorithm"] = algorithm;
        settings["train_fraction"] = train_fraction;
        settings["ablate"] = std::vector<std::string>(options.ablate.begin(),
                                                      options.ablate.end());
        if (algorithm == "gbdt-hist" || algorithm == "gbdt-newton") {
            nlohmann::json g;
            g["iterations"] = options.gbdt.iterations;
            g["learning_rate"] = options.gbdt.learning_rate;
            g["max_leaves"] = options.gbdt.max_leaves;
            g["max_depth"] = options.gbdt.max_depth;
            g["max_bins"] = options.gbdt.max_bins;
            g["min_samples_leaf"] = options.gbdt.min_samples_leaf;
            g["l2_reg"] = options.gbdt.l2_reg;
            settings["gbdt"] = g;
        }
        if (is_nn) {
            nlohmann::json n;
            n["embed_dim"] = options.nn.embed_dim;
            n["hidden1"] = options.nn.hidden1;
            n["hidden2"] = options.nn.hidden2;
            n["conv_channels"] = options.nn.conv_channels;
            n["epochs"] = options.nn.epochs;
            n["batch_size"] = options.nn.batch_size;
            n["lr0"] = options.nn.lr0;
            settings["nn"] = n;
        }
        std::vector<std::string> inputs = {data_path};
        if (is_nn) {
            inputs.push_back(circuits_path);
        }
        write_manifest(global.out_dir, "train", settings, inputs, {model_out, results_path});
    }
};

// ---------------------------------------------------------------------------
// predict

struct PredictCmd {
    GlobalOptions global;
    std::string model_path;
    std::string circuits_path;
    std::string qasm_path;
    std::string out;

    CLI::Option* model_opt = nullptr;
    CLI::Option* circuits_opt = nullptr;
    CLI::Option* qasm_opt = nullptr;
    CLI::Option* out_opt = nullptr;

    void attach(CLI::App* cmd) {
        global.attach(cmd);
        model_opt = cmd->add_option("--model", model_path, "trained model file")->required();
        circuits_opt = cmd->add_option("--circuits", circuits_path,
                                       "circuits file to predict on (JSON lines)");
        qasm_opt = cmd->add_option("--qasm", qasm_path, "single OpenQASM 2.0 circuit file");
        out_opt = cmd->add_option("--out", out,
                                  "output CSV (default <out-dir>/predictions.csv)");
    }

    void run() {
        AppConfig cfg = global.resolve("predict");
        if (circuits_opt->count() == 0 && cfg.find("predict", "circuits") != nullptr) {
            cfg.merge(nullptr, "predict", "circuits", circuits_path);
        }
        if (qasm_opt->count() == 0 && cfg.find("predict", "qasm") != nullptr) {
            cfg.merge(nullptr, "predict", "qasm", qasm_path);
        }
        out = resolve_output(out_opt, cfg, "predict", "out", out, global.out_dir,
                             "predictions.csv");
        if (circuits_path.empty() == qasm_path.empty()) {
            throw UsageError("pass exactly one of --circuits or --qasm");
        }

        const qnoise::ModelFile model = load_model(model_path);
        std::vector<qnoise::Circuit> circuits;
        if (!qasm_path.empty()) {
            std::ifstream in = open_input(qasm_path, "qasm");
            std::ostringstream buffer;
            buffer << in.rdbuf();
            circuits.push_back(qnoise::parse_qasm(
                buffer.str(), std::filesystem::path(qasm_path).filename().string()));
        } else {
            circuits = load_circuits(circuits_path);
            if (circuits.empty()) {
                throw std::runtime_error("circuits file '" + circuits_path +
                                         "' holds no circuits");
            }
        }
        const std::vector<double> predictions = qnoise::predict_circuits(model, circuits);

        std::filesystem::create_directories(global.out_dir);
        std::ofstream file(out, std::ios::binary);
        if (!file) {
            throw std::runtime_error("cannot open '" + out + "' for writing");
        }
        file << "circuit_id,prediction\n";
        for (size_t i = 0; i < circuits.size(); ++i) {
            file << circuits[i].id << ',' << qnoise::format_double17(predictions[i]) << '\n';
        }
        if (!file) {
            throw std::runtime_error("failed writing '" + out + "'");
        }
        std::cerr << "qnoise: wrote " << circuits.size() << " predictions to " << out << "\n";

        nlohmann::json settings;
        settings["model"] = model_path;
        settings["algorithm"] = model.algorithm;
        const std::string input = qasm_path.empty() ? circuits_path : qasm_path;
        write_manifest(global.out_dir, "predict", settings, {model_path, input}, {out});
    }
};

// ---------------------------------------------------------------------------
// bench

double median_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

struct BenchCmd {
    GlobalOptions global;
    std::string model_path;
    std::string data_path;
    std::string circuits_path;
    int repetitions = 3;
    std::string out;

    CLI::Option* model_opt = nullptr;
    CLI::Option* data_opt = nullptr;
    CLI::Option* circuits_opt = nullptr;
    CLI::Option* repetitions_opt = nullptr;
    CLI::Option* out_opt = nullptr;

    void attach(CLI::App* cmd) {
        global.attach(cmd);
        model_opt = cmd->add_option("--model", model_path, "trained model file")->required();
        data_opt = cmd->add_option("--data", data_path,
                                   "labeled dataset (default <out-dir>/dataset.jsonl)");
        circuits_opt = cmd->add_option("--circuits", circuits_path,
                                       "circuits file (required for nn models)");
        repetitions_opt =
            cmd->add_option("--repetitions", repetitions, "timing repetitions (default 3)");
        out_opt = cmd->add_option("--out", out,
                                  "timing table CSV (default <out-dir>/bench.csv)");
    }

    void run() {
        AppConfig cfg = global.resolve("bench");
        cfg.merge(repetitions_opt, "bench", "repetitions", repetitions);
        if (data_opt->count() == 0 && cfg.find("bench", "data") != nullptr) {
            cfg.merge(nullptr, "bench", "data", data_path);
        } else if (data_opt->count() == 0) {
            data_path = joined_path(global.out_dir, "dataset.jsonl");
        }
        if (circuits_opt->count() == 0 && cfg.find("bench", "circuits") != nullptr) {
            cfg.merge(nullptr, "bench", "circuits", circuits_path);
        }
        out = resolve_output(out_opt, cfg, "bench", "out", out, global.out_dir, "bench.csv");
        if (repetitions < 1) {
            throw UsageError("--repetitions must be >= 1");
        }

        const qnoise::ModelFile model = load_model(model_path);
        if (qnoise::is_nn_algorithm(model.algorithm) && circuits_path.empty()) {
            throw UsageError("--circuits is required to bench " + model.algorithm);
        }
        const std::vector<qnoise::LabeledRecord> records = load_records(data_path);
        std::map<std::string, qnoise::Circuit> circuits;
        if (qnoise::is_nn_algorithm(model.algorithm)) {
            circuits = circuits_by_id(load_circuits(circuits_path));
        }

        std::cerr << "qnoise: benchmarking " << model.algorithm << " on " << records.size()
                  << " rows, " << repetitions << " repetitions\n";
        const std::vector<qnoise::BenchTiming> timings =
            qnoise::bench_model(model, records, circuits, repetitions);

        const double rows = static_cast<double>(records.size());
        std::vector<double> fit_times;
        std::vector<double> predict_times;
        std::vector<double> rates;
        for (const qnoise::BenchTiming& t : timings) {
            fit_times.push_back(t.fit_seconds);
            predict_times.push_back(t.predict_seconds);
            rates.push_back(t.predict_seconds > 0.0 ? rows / t.predict_seconds : 0.0);
        }

        std::filesystem::create_directories(global.out_dir);
        std::ofstream file(out, std::ios::binary);
        if (!file) {
            throw std::runtime_error("cannot open '" + out + "' for writing");
        }
        file << "algorithm,rows,repetition,fit_seconds,predict_seconds,predict_rows_per_sec\n";
        for (size_t r = 0; r < timings.size(); ++r) {
            file << model.algorithm << ',' << records.size() << ',' << (r + 1) << ','
                 << qnoise::format_double17(timings[r].fit_seconds) << ','
                 << qnoise::format_double17(timings[r].predict_seconds) << ','
                 << qnoise::format_double17(rates[r]) << '\n';
        }
        if (!file) {
            throw std::runtime_error("failed writing '" + out + "'");
        }

        const auto line = [&](const char* what, const std::vector<double>& v) {
            std::cout << model.algorithm << " " << what
                      << " min=" << qnoise::format_double17(*std::min_element(v.begin(),
                                                                              v.end()))
                      << " median=" << qnoise::format_double17(median_of(v)) << "\n";
        };
        line("fit_seconds", fit_times);
        line("predict_seconds", predict_times);
        line("predict_rows_per_sec", rates);
        std::cerr << "qnoise: wrote timing table to " << out << "\n";

        nlohmann::json settings;
        settings["model"] = model_path;
        settings["algorithm"] = model.algorithm;
        settings["repetitions"] = repetitions;
        settings["rows"] = records.size();
        std::vector<std::string> inputs = {model_path, data_path};
        if (!circuits_path.empty()) {
            inputs.push_back(circuits_path);
        }
        write_manifest(global.out_dir, "bench", settings, inputs, {out});
    }
};

// ---------------------------------------------------------------------------
// report

struct ResultRow {
    std::string algorithm;
    std::string preset;
    double split_fraction = 0.0;
    std::string ablation;
    double mae = 0.0;
    double rmse = 0.0;
    double fit_seconds = 0.0;
    double predict_seconds = 0.0;
};

std::vector<ResultRow> parse_results_file(const std::string& path) {
    std::ifstream in = open_input(path, "results");
    std::string line;
    if (!std::getline(in, line) || qnoise::trim(line) != qnoise::kResultsCsvHeader) {
        throw qnoise::ParseError(1, 1, "results file '" + path +
                                           "' must start with the header '" +
                                           std::string(qnoise::kResultsCsvHeader) + "'");
    }
    std::vector<ResultRow> rows;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (qnoise::trim(line).empty()) {
            continue;
        }
        const std::vector<std::string> fields = qnoise::split_on(qnoise::trim(line), ',');
        if (fields.size() != 8) {
            throw qnoise::ParseError(line_no, 1, "results file '" + path + "': expected 8 " +
                                                     "fields, got " +
                                                     std::to_string(fields.size()));
        }
        const auto number = [&](size_t c, const char* name) {
            char* end = nullptr;
            const double v = std::strtod(fields[c].c_str(), &end);
            if (end == fields[c].c_str() || *end != '\0') {
                throw qnoise::ParseError(line_no, 1, "results file '" + path + "': field '" +
                                                         name + "' is not a number: '" +
                                                         fields[c] + "'");
            }
            return v;
        };
        ResultRow row;
        row.algorithm = fields[0];
        row.preset = fields[1];
        row.split_fraction = number(2, "split_fraction");
        row.ablation = fields[3];
        row.mae = number(4, "mae");
        row.rmse = number(5, "rmse");
        row.fit_seconds = number(6, "fit_seconds");
        row.predict_seconds = number(7, "predict_seconds");
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string format_cell_value(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.3f", v);
    return buffer;
}

struct ReportCmd {
    GlobalOptions global;
    std::vector<std::string> results_paths;

    CLI::Option* results_opt = nullptr;

    void attach(CLI::App* cmd) {
        global.attach(cmd);
        results_opt = cmd->add_option("--results", results_paths,
                                      "results CSVs to merge (default <out-dir>/results.csv)");
    }

    void run() {
        AppConfig cfg = global.resolve("report");
        if (results_opt->count() == 0 && cfg.find("report", "results") != nullptr) {
            cfg.merge(nullptr, "report", "results", results_paths);
        } else if (results_opt->count() == 0) {
            results_paths = {joined_path(global.out_dir, "results.csv")};
        }

        std::vector<ResultRow> rows;
        for (const std::string& path : results_paths) {
            std::vector<ResultRow> part = parse_results_file(path);
            rows.insert(rows.end(), part.begin(), part.end());
        }
        if (rows.empty()) {
            throw qnoise::ParseError(1, 1, "results hold no data rows");
        }

        // The arrow pairs the smallest split against the largest; later rows win
        // when a (algorithm, preset, ablation, split) cell is reported twice.
        double lo = rows.front().split_fraction;
        double hi = lo;
        std::set<std::string> algorithms;
        std::set<std::pair<std::string, std::string>> groups;
        std::map<std::tuple<std::string, std::string, std::string, double>, ResultRow> cells;
        for (const ResultRow& row : rows) {
            lo = std::min(lo, row.split_fraction);
            hi = std::max(hi, row.split_fraction);
            algorithms.insert(row.algorithm);
            groups.insert({row.preset, row.ablation});
            cells[{row.algorithm, row.preset, row.ablation, row.split_fraction}] = row;
        }

        // Full-feature columns precede ablations within each preset.
        std::vector<std::pair<std::string, std::string>> columns(groups.begin(), groups.end());
        std::sort(columns.begin(), columns.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) {
                return a.first < b.first;
            }
            if ((a.second == "none") != (b.second == "none")) {
                return a.second == "none";
            }
            return a.second < b.second;
        });

        const auto cell = [&](const std::string& algorithm, const auto& column,
                              double fraction, double ResultRow::*field) -> std::string {
            const auto it = cells.find({algorithm, column.first, column.second, fraction});
            return it == cells.end() ? "-" : format_cell_value(it->second.*field);
        };
        const auto arrow_cell = [&](const std::string& algorithm, const auto& column,
                                    double ResultRow::*field) {
            if (lo == hi) {
                return cell(algorithm, column, lo, field);
            }
            return cell(algorithm, column, lo, field) + " -> " +
                   cell(algorithm, column, hi, field);
        };
        const auto print_table = [&](const std::string& title,
                                     const std::vector<std::string>& labels,
                                     const std::vector<std::vector<std::string>>& body) {
            std::vector<std::string> head = {"algorithm"};
            head.insert(head.end(), labels.begin(), labels.end());
            std::vector<std::vector<std::string>> table = {head};
            size_t i = 0;
            for (const std::string& algorithm : algorithms) {
                std::vector<std::string> line = {algorithm};
                line.insert(line.end(), body[i].begin(), body[i].end());
                table.push_back(std::move(line));
                ++i;
            }
            std::vector<size_t> widths(head.size());
            for (const std::vector<std::string>& line : table) {
                for (size_t c = 0; c < line.size(); ++c) {
                    widths[c] = std::max(widths[c], line[c].size());
                }
            }
            std::cout << "== " << title << " ==\n";
            for (const std::vector<std::string>& line : table) {
                for (size_t c = 0; c < line.size(); ++c) {
                    std::cout << line[c];
                    if (c + 1 < line.size()) {
                        std::cout << std::string(widths[c] - line[c].size() + 2, ' ');
                    }
                }
                std::cout << "\n";
            }
            std::cout << "\n";
        };
        const auto column_label = [](const std::pair<std::string, std::string>& column) {
            return column.second == "none" ? column.first
                                           : column.first + " ablate=" + column.second;
        };

        if (lo == hi) {
            std::cout << "split " << qnoise::format_double17(lo) << "\n\n";
        } else {
            std::cout << "split " << qnoise::format_double17(lo) << " -> "
                      << qnoise::format_double17(hi) << "\n\n";
        }
        const auto metric_table = [&](const std::string& title, double ResultRow::*field) {
            std::vector<std::string> labels;
            for (const auto& column : columns) {
                labels.push_back(column_label(column));
            }
            std::vector<std::vector<std::string>> body;
            for (const std::string& algorithm : algorithms) {
                std::vector<std::string> line;
                for (const auto& column : columns) {
                    line.push_back(arrow_cell(algorithm, column, field));
                }
                body.push_back(std::move(line));
            }
            print_table(title, labels, body);
        };
        metric_table("mae", &ResultRow::mae);
        metric_table("rmse", &ResultRow::rmse);

        std::vector<std::string> timing_labels;
        std::vector<std::vector<std::string>> timing_body;
        for (const auto& column : columns) {
            timing_labels.push_back(column_label(column) + " fit");
            timing_labels.push_back(column_label(column) + " predict");
        }
        for (const std::string& algorithm : algorithms) {
            std::vector<std::string> line;
            for (const auto& column : columns) {
                line.push_back(arrow_cell(algorithm, column, &ResultRow::fit_seconds));
                line.push_back(arrow_cell(algorithm, column, &ResultRow::predict_seconds));
            }
            timing_body.push_back(std::move(line));
        }
        print_table("seconds", timing_labels, timing_body);
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qnoise: learn to predict quantum-circuit noise from circuit structure"};
    app.require_subcommand(1);

    GenerateCmd generate;
    generate.attach(app.add_subcommand("generate", "generate a random circuit corpus"));
    LabelCmd label;
    label.attach(app.add_subcommand(
        "label", "simulate circuits and label them with ideal-vs-noisy cosine distance"));
    TrainCmd train;
    train.attach(app.add_subcommand("train", "fit a model and evaluate it on a held-out split"));
    PredictCmd predict;
    predict.attach(app.add_subcommand("predict", "apply a trained model to circuits"));
    BenchCmd bench;
    bench.attach(app.add_subcommand("bench", "time model fit and predict throughput"));
    ReportCmd report;
    report.attach(app.add_subcommand("report", "render results CSVs as comparison tables"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (app.got_subcommand("generate")) {
            generate.run();
        } else if (app.got_subcommand("label")) {
            label.run();
        } else if (app.got_subcommand("train")) {
            train.run();
        } else if (app.got_subcommand("predict")) {
            predict.run();
        } else if (app.got_subcommand("bench")) {
            bench.run();
        } else if (app.got_subcommand("report")) {
            report.run();
        }
        return 0;
    } catch (const UsageError& e) {
        std::cerr << "qnoise: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "qnoise: " << e.what() << "\n";
        return kExitUsage;
    } catch (const qnoise::NumericError& e) {
        std::cerr << "qnoise: numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const qnoise::ParseError& e) {
        std::cerr << "qnoise: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "qnoise: " << e.what() << "\n";
        return kExitData;
    }
}
