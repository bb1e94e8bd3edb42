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
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "qnoise/matrix.hpp"

namespace qnoise {

/// One boosting engine, two growth/gain modes:
///   HistFirstOrder — first-order gradients, leaf-wise best-first growth to
///                    max_leaves (histogram-GBM style; defaults lr=0.1)
///   Newton         — second-order gain with L2 regularization, depth-wise
///                    growth to max_depth (XGBoost style; defaults lr=0.3)
enum class GbdtMode { HistFirstOrder, Newton };

inline const char* gbdt_mode_name(GbdtMode mode) {
    return mode == GbdtMode::HistFirstOrder ? "hist-first-order" : "newton";
}

inline GbdtMode gbdt_mode_from_name(const std::string& name) {
    if (name == "hist-first-order") {
        return GbdtMode::HistFirstOrder;
    }
    if (name == "newton") {
        return GbdtMode::Newton;
    }
    throw std::invalid_argument("unknown gbdt mode '" + name +
                                "' (valid: hist-first-order, newton)");
}

struct GbdtConfig {
    GbdtMode mode = GbdtMode::HistFirstOrder;
    int iterations = 100;
    double learning_rate = 0.1;  // 0.3 in newton mode
    int max_leaves = 31;         // hist mode growth limit
    int max_depth = 6;           // newton mode growth limit
    int max_bins = 255;
    int min_samples_leaf = 20;
    double l2_reg = 1.0;         // newton gain/leaf regularizer
};

/// The per-mode default hyperparameters (mirroring the respective libraries'
/// published defaults).
inline GbdtConfig gbdt_default_config(GbdtMode mode) {
    GbdtConfig c;
    c.mode = mode;
    c.learning_rate = mode == GbdtMode::HistFirstOrder ? 0.1 : 0.3;
    return c;
}

inline void validate_gbdt_config(const GbdtConfig& c) {
    if (c.iterations < 0) {
        throw std::invalid_argument("gbdt: iterations must be >= 0");
    }
    if (!(c.learning_rate > 0.0)) {
        throw std::invalid_argument("gbdt: learning_rate must be positive");
    }
    if (c.max_leaves < 2) {
        throw std::invalid_argument("gbdt: max_leaves must be >= 2");
    }
    if (c.max_depth < 1) {
        throw std::invalid_argument("gbdt: max_depth must be >= 1");
    }
    if (c.max_bins < 2 || c.max_bins > 255) {
        throw std::invalid_argument("gbdt: max_bins must be in 2..255");
    }
    if (c.min_samples_leaf < 1) {
        throw std::invalid_argument("gbdt: min_samples_leaf must be >= 1");
    }
    if (!(c.l2_reg > 0.0)) {
        throw std::invalid_argument("gbdt: l2_reg must be positive");
    }
}

/// feature < 0 marks a leaf. An internal node routes value <= threshold left.
struct GbdtNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
};

struct GbdtTree {
    std::vector<GbdtNode> nodes;  // root at index 0

    double value_for(const double* row) const {
        int at = 0;
        while (nodes[static_cast<size_t>(at)].feature >= 0) {
            const GbdtNode& node = nodes[static_cast<size_t>(at)];
            at = row[node.feature] <= node.threshold ? node.left : node.right;
        }
        return nodes[static_cast<size_t>(at)].value;
    }
};

/// Gradient-boosted regression trees over binned features.
///
/// Fixed algorithmic points (all deterministic; the fit seed is unused):
///   - equal-frequency bin edges per feature: dedup{sorted[floor(k*N/B)],
///     k = 1..B-1} with B = max_bins; bin(v) = number of edges < v
///   - gradients g = prediction - label, hessians h == 1
///   - split gain: hist  G_l^2/n_l + G_r^2/n_r - G_p^2/n_p
///                 newton 0.5*(G_l^2/(n_l+l2) + G_r^2/(n_r+l2) - G_p^2/(n_p+l2))
///   - leaf value: hist -G/n, newton -G/(n+l2)
///   - a split must clear gain 1e-12 and leave min_samples_leaf per side
///   - gain ties break toward the lower feature index, then lower threshold
class GbdtModel {
public:
    static constexpr double kMinGain = 1e-12;

    void fit(const Matrix& x, const std::vector<double>& y, const GbdtConfig& config,
             uint64_t /*seed*/ = 0) {
        validate_gbdt_config(config);
        if (x.rows == 0 || x.cols == 0 || x.rows != y.size()) {
            throw std::invalid_argument("gbdt: empty data or row/label mismatch");
        }
        if (x.rows < 2 * static_cast<size_t>(config.min_samples_leaf)) {
            throw std::invalid_argument("gbdt: need at least 2*min_samples_leaf rows, got " +
                                        std::to_string(x.rows));
        }
        for (double v : y) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("gbdt: non-finite label");
            }
        }
        for (double v : x.data) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("gbdt: non-finite feature value");
            }
        }
        config_ = config;
        const size_t n = x.rows;
        const size_t f = x.cols;

        bin_edges_ = compute_bin_edges(x, config.max_bins);
        // Prebin the training matrix: bin = count of edges strictly below v.
        std::vector<uint8_t> binned(n * f);
        for (size_t r = 0; r < n; ++r) {
            for (size_t c = 0; c < f; ++c) {
                binned[r * f + c] = bin_of(x.at(r, c), bin_edges_[c]);
            }
        }

        double sum = 0.0;
        for (double v : y) {
            sum += v;
        }
        base_ = sum / static_cast<double>(n);
        trees_.clear();

        std::vector<double> preds(n, base_);
        std::vector<double> grad(n);
        for (int iter = 0; iter < config.iterations; ++iter) {
            for (size_t i = 0; i < n; ++i) {
                grad[i] = preds[i] - y[i];
            }
            GbdtTree tree = grow_tree(binned, grad, f);
            // Update predictions leaf-by-leaf via the stored per-leaf sample
            // lists filled in by grow_tree.
            for (const LeafUpdate& u : leaf_updates_) {
                for (int i : u.samples) {
                    preds[static_cast<size_t>(i)] += config.learning_rate * u.value;
                }
            }
            trees_.push_back(std::move(tree));
        }
        fitted_ = true;
    }

    double predict_one(const double* row) const {
        require_fitted();
        double acc = base_;
        for (const GbdtTree& tree : trees_) {
            acc += config_.learning_rate * tree.value_for(row);
        }
        return acc;
    }

    std::vector<double> predict(const Matrix& x) const {
        require_fitted();
        std::vector<double> out(x.rows);
        for (size_t r = 0; r < x.rows; ++r) {
            out[r] = predict_one(x.row(r));
        }
        return out;
    }

    /// Stored parameters: the base prediction plus one value or threshold
    /// per tree node.
    size_t parameter_count() const {
        size_t count = 1;
        for (const GbdtTree& tree : trees_) {
            count += tree.nodes.size();
        }
        return count;
    }

    bool fitted() const { return fitted_; }
    const GbdtConfig& config() const { return config_; }
    double base() const { return base_; }
    const std::vector<GbdtTree>& trees() const { return trees_; }
    const std::vector<std::vector<double>>& bin_edges() const { return bin_edges_; }

    /// Restores a fitted model from stored parts (model file loading).
    void restore(const GbdtConfig& config, double base, std::vector<GbdtTree> trees,
                 std::vector<std::vector<double>> bin_edges) {
        validate_gbdt_config(config);
        config_ = config;
        base_ = base;
        trees_ = std::move(trees);
        bin_edges_ = std::move(bin_edges);
        fitted_ = true;
    }

    /// Candidate thresholds for a feature column (exposed for oracle tests).
    static std::vector<double> feature_bin_edges(std::vector<double> column, int max_bins) {
        std::sort(column.begin(), column.end());
        std::vector<double> edges;
        const size_t n = column.size();
        for (int k = 1; k < max_bins; ++k) {
            const size_t at = static_cast<size_t>(
                (static_cast<uint64_t>(k) * n) / static_cast<uint64_t>(max_bins));
            const double edge = column[std::min(at, n - 1)];
            if (edges.empty() || edge != edges.back()) {
                edges.push_back(edge);
            }
        }
        return edges;
    }

private:
    struct LeafUpdate {
        std::vector<int> samples;
        double value = 0.0;
    };

    struct BuildNode {
        int node_index = -1;
        int depth = 0;
        std::vector<int> samples;
        double sum_g = 0.0;
        // Best split over this node's samples (gain <= kMinGain → none).
        double gain = 0.0;
        int feature = -1;
        int bin = -1;
    };

    void require_fitted() const {
        if (!fitted_) {
            throw std::logic_error("gbdt: model is not fitted");
        }
    }

    static std::vector<std::vector<double>> compute_bin_edges(const Matrix& x, int max_bins) {
        std::vector<std::vector<double>> edges(x.cols);
        std::vector<double> column(x.rows);
        for (size_t c = 0; c < x.cols; ++c) {
            for (size_t r = 0; r < x.rows; ++r) {
                column[r] = x.at(r, c);
            }
            edges[c] = feature_bin_edges(column, max_bins);
        }
        return edges;
    }

    static uint8_t bin_of(double v, const std::vector<double>& edges) {
        return static_cast<uint8_t>(std::lower_bound(edges.begin(), edges.end(), v) -
                                    edges.begin());
    }

    double split_score(double g, double n_count) const {
        if (config_.mode == GbdtMode::HistFirstOrder) {
            return g * g / n_count;
        }
        return g * g / (n_count + config_.l2_reg);
    }

    double leaf_value(double g, double n_count) const {
        if (config_.mode == GbdtMode::HistFirstOrder) {
            return -g / n_count;
        }
        return -g / (n_count + config_.l2_reg);
    }

    /// Fills build.gain/feature/bin with the best (feature, threshold) split.
    void find_best_split(BuildNode& build, const std::vector<uint8_t>& binned,
                         const std::vector<double>& grad, size_t f) const {
        build.gain = 0.0;
        build.feature = -1;
        build.bin = -1;
        const double n_p = static_cast<double>(build.samples.size());
        if (build.samples.size() < 2 * static_cast<size_t>(config_.min_samples_leaf)) {
            return;
        }
        const double parent_score = split_score(build.sum_g, n_p);
        const double half = config_.mode == GbdtMode::Newton ? 0.5 : 1.0;
        std::vector<double> hist_g;
        std::vector<int> hist_n;
        for (size_t c = 0; c < f; ++c) {
            const size_t bins = bin_edges_[c].size() + 1;
            if (bins < 2) {
                continue;  // constant feature
            }
            hist_g.assign(bins, 0.0);
            hist_n.assign(bins, 0);
            for (int i : build.samples) {
                const uint8_t b = binned[static_cast<size_t>(i) * f + c];
                hist_g[b] += grad[static_cast<size_t>(i)];
                ++hist_n[b];
            }
            double g_l = 0.0;
            int n_l = 0;
            // Splitting after bin b uses threshold edges[c][b]: left = {v <= edge}.
            for (size_t b = 0; b + 1 < bins; ++b) {
                g_l += hist_g[b];
                n_l += hist_n[b];
                const int n_r = static_cast<int>(build.samples.size()) - n_l;
                if (n_l < config_.min_samples_leaf || n_r < config_.min_samples_leaf) {
                    continue;
                }
                const double g_r = build.sum_g - g_l;
                const double gain =
                    half * (split_score(g_l, n_l) + split_score(g_r, n_r) - parent_score);
                if (gain > build.gain && gain > kMinGain) {
                    build.gain = gain;
                    build.feature = static_cast<int>(c);
                    build.bin = static_cast<int>(b);
                }
            }
        }
    }

    /// Splits `parent` on its recorded best split, returning the two child
    /// build nodes (left = bin <= best bin).
    std::pair<BuildNode, BuildNode> apply_split(GbdtTree& tree, BuildNode& parent,
                                                const std::vector<uint8_t>& binned,
                                                const std::vector<double>& grad,
                                                size_t f) const {
        GbdtNode& node = tree.nodes[static_cast<size_t>(parent.node_index)];
        node.feature = parent.feature;
        node.threshold = bin_edges_[static_cast<size_t>(parent.feature)]
                                   [static_cast<size_t>(parent.bin)];
        node.left = static_cast<int>(tree.nodes.size());
        node.right = node.left + 1;
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        BuildNode left;
        BuildNode right;
        left.node_index = node.left;
        right.node_index = node.right;
        left.depth = right.depth = parent.depth + 1;
        for (int i : parent.samples) {
            const uint8_t b =
                binned[static_cast<size_t>(i) * f + static_cast<size_t>(parent.feature)];
            BuildNode& side = b <= parent.bin ? left : right;
            side.samples.push_back(i);
            side.sum_g += grad[static_cast<size_t>(i)];
        }
        return {std::move(left), std::move(right)};
    }

    void finalize_leaf(GbdtTree& tree, BuildNode& build) {
        const double value =
            leaf_value(build.sum_g, static_cast<double>(build.samples.size()));
        tree.nodes[static_cast<size_t>(build.node_index)].value = value;
        leaf_updates_.push_back({std::move(build.samples), value});
    }

    GbdtTree grow_tree(const std::vector<uint8_t>& binned, const std::vector<double>& grad,
                       size_t f) {
        leaf_updates_.clear();
        GbdtTree tree;
        tree.nodes.emplace_back();
        BuildNode root;
        root.node_index = 0;
        root.samples.resize(grad.size());
        for (size_t i = 0; i < grad.size(); ++i) {
            root.samples[i] = static_cast<int>(i);
            root.sum_g += grad[i];
        }
        if (config_.mode == GbdtMode::HistFirstOrder) {
            grow_leafwise(tree, std::move(root), binned, grad, f);
        } else {
            grow_depthwise(tree, std::move(root), binned, grad, f);
        }
        return tree;
    }

    /// Best-first growth: always split the pending leaf with the highest
    /// gain (ties → lower node index) until max_leaves is reached or no leaf
    /// has a valid split.
    void grow_leafwise(GbdtTree& tree, BuildNode root, const std::vector<uint8_t>& binned,
                       const std::vector<double>& grad, size_t f) {
        find_best_split(root, binned, grad, f);
        std::vector<BuildNode> pending;
        pending.push_back(std::move(root));
        int leaves = 1;
        while (leaves < config_.max_leaves) {
            int best = -1;
            for (size_t i = 0; i < pending.size(); ++i) {
                if (pending[i].feature < 0) {
                    continue;
                }
                if (best < 0 || pending[i].gain > pending[static_cast<size_t>(best)].gain ||
                    (pending[i].gain == pending[static_cast<size_t>(best)].gain &&
                     pending[i].node_index < pending[static_cast<size_t>(best)].node_index)) {
                    best = static_cast<int>(i);
                }
            }
            if (best < 0) {
                break;
            }
            BuildNode chosen = std::move(pending[static_cast<size_t>(best)]);
            pending.erase(pending.begin() + best);
            auto [left, right] = apply_split(tree, chosen, binned, grad, f);
            find_best_split(left, binned, grad, f);
            find_best_split(right, binned, grad, f);
            pending.push_back(std::move(left));
            pending.push_back(std::move(right));
            ++leaves;
        }
        for (BuildNode& leaf : pending) {
            finalize_leaf(tree, leaf);
        }
    }

    /// Depth-wise growth: split every splittable node level by level until
    /// max_depth.
    void grow_depthwise(GbdtTree& tree, BuildNode root, const std::vector<uint8_t>& binned,
                        const std::vector<double>& grad, size_t f) {
        std::vector<BuildNode> frontier;
        frontier.push_back(std::move(root));
        for (size_t at = 0; at < frontier.size(); ++at) {
            // frontier grows while iterating; index-based loop is deliberate.
            BuildNode node = std::move(frontier[at]);
            if (node.depth < config_.max_depth) {
                find_best_split(node, binned, grad, f);
            } else {
                node.feature = -1;
            }
            if (node.feature < 0) {
                finalize_leaf(tree, node);
                continue;
            }
            auto [left, right] = apply_split(tree, node, binned, grad, f);
            frontier.push_back(std::move(left));
            frontier.push_back(std::move(right));
        }
    }

    GbdtConfig config_;
    double base_ = 0.0;
    std::vector<GbdtTree> trees_;
    std::vector<std::vector<double>> bin_edges_;
    std::vector<LeafUpdate> leaf_updates_;
    bool fitted_ = false;
};

}  // namespace qnoise
