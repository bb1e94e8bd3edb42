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

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qnoise/errors.hpp"
#include "qnoise/gbdt.hpp"
#include "qnoise/linear.hpp"
#include "qnoise/nn.hpp"
#include "qnoise/text.hpp"

namespace qnoise {

inline constexpr int kModelFormatVersion = 1;

inline const std::vector<std::string>& model_algorithm_names() {
    static const std::vector<std::string> kNames = {"linreg", "gbdt-hist", "gbdt-newton",
                                                    "nn-dense", "nn-cnn"};
    return kNames;
}

inline bool is_model_algorithm(const std::string& name) {
    for (const std::string& n : model_algorithm_names()) {
        if (n == name) {
            return true;
        }
    }
    return false;
}

inline bool is_nn_algorithm(const std::string& name) {
    return name == "nn-dense" || name == "nn-cnn";
}

/// A trained model plus the metadata needed to apply it: the vocabulary it
/// was trained against (token order), the ablated gate names, and the noise
/// preset its labels came from. Exactly one of the three engines is fitted,
/// selected by `algorithm`.
struct ModelFile {
    int format_version = kModelFormatVersion;
    std::string algorithm;
    std::vector<std::string> vocabulary;
    std::vector<std::string> ablate;
    std::string preset;
    LinearModel linear;
    GbdtModel gbdt;
    NnRegressor nn;
};

namespace internal {

inline void append_double_array(std::string& out, const std::vector<double>& values) {
    out += '[';
    for (size_t i = 0; i < values.size(); ++i) {
        if (i != 0) {
            out += ',';
        }
        out += format_double17(values[i]);
    }
    out += ']';
}

inline void append_string_array(std::string& out, const std::vector<std::string>& values) {
    out += '[';
    for (size_t i = 0; i < values.size(); ++i) {
        if (i != 0) {
            out += ',';
        }
        out += '"';
        out += json_escape(values[i]);
        out += '"';
    }
    out += ']';
}

inline void append_linear_payload(std::string& out, const LinearModel& m) {
    out += "{\"intercept\":";
    out += format_double17(m.intercept());
    out += ",\"weights\":";
    append_double_array(out, m.weights());
    out += '}';
}

inline void append_gbdt_payload(std::string& out, const GbdtModel& m) {
    const GbdtConfig& c = m.config();
    out += "{\"base_score\":";
    out += format_double17(m.base());
    out += ",\"bin_edges\":[";
    for (size_t i = 0; i < m.bin_edges().size(); ++i) {
        if (i != 0) {
            out += ',';
        }
        append_double_array(out, m.bin_edges()[i]);
    }
    out += "],\"config\":{\"iterations\":";
    out += std::to_string(c.iterations);
    out += ",\"l2_reg\":";
    out += format_double17(c.l2_reg);
    out += ",\"learning_rate\":";
    out += format_double17(c.learning_rate);
    out += ",\"max_bins\":";
    out += std::to_string(c.max_bins);
    out += ",\"max_depth\":";
    out += std::to_string(c.max_depth);
    out += ",\"max_leaves\":";
    out += std::to_string(c.max_leaves);
    out += ",\"min_samples_leaf\":";
    out += std::to_string(c.min_samples_leaf);
    out += ",\"mode\":\"";
    out += gbdt_mode_name(c.mode);
    out += "\"},\"trees\":[";
    for (size_t t = 0; t < m.trees().size(); ++t) {
        if (t != 0) {
            out += ',';
        }
        out += '[';
        const std::vector<GbdtNode>& nodes = m.trees()[t].nodes;
        for (size_t i = 0; i < nodes.size(); ++i) {
            if (i != 0) {
                out += ',';
            }
            const GbdtNode& n = nodes[i];
            out += "{\"feature\":";
            out += std::to_string(n.feature);
            out += ",\"left\":";
            out += std::to_string(n.left);
            out += ",\"right\":";
            out += std::to_string(n.right);
            out += ",\"threshold\":";
            out += format_double17(n.threshold);
            out += ",\"value\":";
            out += format_double17(n.value);
            out += '}';
        }
        out += ']';
    }
    out += "]}";
}

inline void append_nn_payload(std::string& out, const NnRegressor& m) {
    const NnConfig& c = m.config();
    out += "{\"arch\":\"";
    out += nn_arch_name(m.arch());
    out += "\",\"config\":{\"batch_size\":";
    out += std::to_string(c.batch_size);
    out += ",\"beta1\":";
    out += format_double17(c.beta1);
    out += ",\"beta2\":";
    out += format_double17(c.beta2);
    out += ",\"conv_channels\":";
    out += std::to_string(c.conv_channels);
    out += ",\"embed_dim\":";
    out += std::to_string(c.embed_dim);
    out += ",\"epochs\":";
    out += std::to_string(c.epochs);
    out += ",\"epsilon\":";
    out += format_double17(c.epsilon);
    out += ",\"hidden1\":";
    out += std::to_string(c.hidden1);
    out += ",\"hidden2\":";
    out += std::to_string(c.hidden2);
    out += ",\"lr0\":";
    out += format_double17(c.lr0);
    out += "},\"params\":";
    append_double_array(out, m.params());
    out += ",\"vocab_size\":";
    out += std::to_string(m.vocab_size());
    out += '}';
}

}  // namespace internal

/// Canonical single-line JSON for a model file. Floats carry 17 significant
/// digits, so a save/load round trip reproduces predictions bit-for-bit.
inline std::string serialize_model(const ModelFile& m) {
    if (!is_model_algorithm(m.algorithm)) {
        throw std::invalid_argument("serialize_model: unknown algorithm '" + m.algorithm + "'");
    }
    std::string out = "{\"format_version\":";
    out += std::to_string(m.format_version);
    out += ",\"algorithm\":\"";
    out += json_escape(m.algorithm);
    out += "\",\"preset\":\"";
    out += json_escape(m.preset);
    out += "\",\"vocabulary\":";
    internal::append_string_array(out, m.vocabulary);
    out += ",\"ablate\":";
    internal::append_string_array(out, m.ablate);
    out += ",\"payload\":";
    if (m.algorithm == "linreg") {
        internal::append_linear_payload(out, m.linear);
    } else if (m.algorithm == "gbdt-hist" || m.algorithm == "gbdt-newton") {
        internal::append_gbdt_payload(out, m.gbdt);
    } else {
        internal::append_nn_payload(out, m.nn);
    }
    out += '}';
    return out;
}

inline ModelFile deserialize_model(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(1, 1, std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        ModelFile m;
        m.format_version = j.at("format_version").get<int>();
        if (m.format_version != kModelFormatVersion) {
            throw ParseError(1, 1,
                             "unsupported model format_version " +
                                 std::to_string(m.format_version) + " (expected " +
                                 std::to_string(kModelFormatVersion) + ")");
        }
        m.algorithm = j.at("algorithm").get<std::string>();
        if (!is_model_algorithm(m.algorithm)) {
            throw ParseError(1, 1, "unknown model algorithm '" + m.algorithm + "'");
        }
        m.preset = j.at("preset").get<std::string>();
        m.vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
        m.ablate = j.at("ablate").get<std::vector<std::string>>();
        const nlohmann::json& p = j.at("payload");
        if (m.algorithm == "linreg") {
            m.linear.restore(p.at("weights").get<std::vector<double>>(),
                             p.at("intercept").get<double>());
        } else if (m.algorithm == "gbdt-hist" || m.algorithm == "gbdt-newton") {
            const nlohmann::json& jc = p.at("config");
            GbdtConfig config;
            config.mode = gbdt_mode_from_name(jc.at("mode").get<std::string>());
            if (gbdt_mode_name(config.mode) !=
                (m.algorithm == "gbdt-hist" ? std::string("hist-first-order")
                                            : std::string("newton"))) {
                throw ParseError(1, 1, "model algorithm '" + m.algorithm +
                                           "' does not match gbdt mode '" +
                                           jc.at("mode").get<std::string>() + "'");
            }
            config.iterations = jc.at("iterations").get<int>();
            config.l2_reg = jc.at("l2_reg").get<double>();
            config.learning_rate = jc.at("learning_rate").get<double>();
            config.max_bins = jc.at("max_bins").get<int>();
            config.max_depth = jc.at("max_depth").get<int>();
            config.max_leaves = jc.at("max_leaves").get<int>();
            config.min_samples_leaf = jc.at("min_samples_leaf").get<int>();
            std::vector<GbdtTree> trees;
            for (const nlohmann::json& jt : p.at("trees")) {
                GbdtTree tree;
                for (const nlohmann::json& jn : jt) {
                    GbdtNode node;
                    node.feature = jn.at("feature").get<int>();
                    node.threshold = jn.at("threshold").get<double>();
                    node.left = jn.at("left").get<int>();
                    node.right = jn.at("right").get<int>();
                    node.value = jn.at("value").get<double>();
                    tree.nodes.push_back(node);
                }
                if (tree.nodes.empty()) {
                    throw ParseError(1, 1, "model file holds an empty tree");
                }
                trees.push_back(std::move(tree));
            }
            std::vector<std::vector<double>> bin_edges;
            for (const nlohmann::json& je : p.at("bin_edges")) {
                bin_edges.push_back(je.get<std::vector<double>>());
            }
            m.gbdt.restore(config, p.at("base_score").get<double>(), std::move(trees),
                           std::move(bin_edges));
        } else {
            const nlohmann::json& jc = p.at("config");
            NnConfig config;
            config.batch_size = jc.at("batch_size").get<int>();
            config.beta1 = jc.at("beta1").get<double>();
            config.beta2 = jc.at("beta2").get<double>();
            config.conv_channels = jc.at("conv_channels").get<int>();
            config.embed_dim = jc.at("embed_dim").get<int>();
            config.epochs = jc.at("epochs").get<int>();
            config.epsilon = jc.at("epsilon").get<double>();
            config.hidden1 = jc.at("hidden1").get<int>();
            config.hidden2 = jc.at("hidden2").get<int>();
            config.lr0 = jc.at("lr0").get<double>();
            const NnArch arch = nn_arch_from_name(p.at("arch").get<std::string>());
            if ((arch == NnArch::Dense) != (m.algorithm == "nn-dense")) {
                throw ParseError(1, 1, "model algorithm '" + m.algorithm +
                                           "' does not match nn arch '" +
                                           p.at("arch").get<std::string>() + "'");
            }
            m.nn.restore(arch, config, p.at("vocab_size").get<int>(),
                         p.at("params").get<std::vector<double>>());
        }
        return m;
    } catch (const ParseError&) {
        throw;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(1, 1, std::string("model file is missing or mistypes a field: ") +
                                   e.what());
    } catch (const std::invalid_argument& e) {
        throw ParseError(1, 1, std::string("model file holds invalid values: ") + e.what());
    }
}

inline void write_model(const std::string& path, const ModelFile& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    out << serialize_model(m) << '\n';
    if (!out) {
        throw std::runtime_error("failed writing '" + path + "'");
    }
}

inline ModelFile read_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "' for reading");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return deserialize_model(buffer.str());
}

}  // namespace qnoise
