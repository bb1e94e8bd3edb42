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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "qnoise/gbdt.hpp"
#include "qnoise/matrix.hpp"
#include "qnoise/prng.hpp"

namespace {

using qnoise::GbdtConfig;
using qnoise::GbdtMode;
using qnoise::GbdtModel;
using qnoise::GbdtNode;
using qnoise::GbdtTree;
using qnoise::Matrix;
using qnoise::Xoshiro256StarStar;

double mean_of(const std::vector<double>& values) {
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    return sum / static_cast<double>(values.size());
}

double train_mse(const GbdtModel& model, const Matrix& x, const std::vector<double>& y) {
    double acc = 0.0;
    for (size_t r = 0; r < x.rows; ++r) {
        const double d = model.predict_one(x.row(r)) - y[r];
        acc += d * d;
    }
    return acc / static_cast<double>(x.rows);
}

struct SmallDataset {
    Matrix x{0, 0};
    std::vector<double> y;
};

// A seeded dataset small enough (rows <= 200 < max_bins) that every distinct
// feature value becomes a bin edge, making a raw-value scan an exact oracle
// for the binned engine. Columns mix continuous, small-integer, and rounded
// styles so duplicated values and exact gain ties actually occur.
SmallDataset make_dataset(uint64_t seed) {
    Xoshiro256StarStar rng(qnoise::splitmix64(seed));
    const size_t rows = 40 + rng.below(161);  // 40..200
    const size_t cols = 1 + rng.below(5);     // 1..5
    SmallDataset d;
    d.x = Matrix(rows, cols);
    std::vector<int> style(cols);
    for (size_t c = 0; c < cols; ++c) {
        style[c] = static_cast<int>(rng.below(3));
    }
    for (size_t r = 0; r < rows; ++r) {
        for (size_t c = 0; c < cols; ++c) {
            double v = 0.0;
            switch (style[c]) {
                case 0: v = rng.uniform(0.0, 10.0); break;
                case 1: v = static_cast<double>(rng.below(6)); break;
                default: v = std::round(rng.uniform(-1.0, 1.0) * 10.0) / 10.0; break;
            }
            d.x.at(r, c) = v;
        }
    }
    std::vector<double> w(cols);
    for (size_t c = 0; c < cols; ++c) {
        w[c] = rng.uniform(-1.0, 1.0);
    }
    d.y.resize(rows);
    const bool pure_noise = seed % 5 == 0;
    for (size_t r = 0; r < rows; ++r) {
        if (pure_noise) {
            d.y[r] = rng.uniform(0.0, 1.0);
        } else {
            double v = rng.uniform(-0.2, 0.2);
            for (size_t c = 0; c < cols; ++c) {
                v += w[c] * d.x.at(r, c);
            }
            d.y[r] = v;
        }
    }
    return d;
}

struct RootSplit {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

// Exhaustive best-first-split scan over raw feature values, written against
// the documented gain formulas only (no binning, no engine internals). Scans
// features then thresholds in ascending order with a strict > comparison so
// ties resolve the same way the engine documents.
RootSplit scan_root_split(const Matrix& x, const std::vector<double>& y, GbdtMode mode,
                          int min_samples_leaf, double l2_reg) {
    const size_t n = x.rows;
    const double base = mean_of(y);
    std::vector<double> g(n);
    double sum_g = 0.0;
    for (size_t i = 0; i < n; ++i) {
        g[i] = base - y[i];
        sum_g += g[i];
    }
    const auto score = [&](double s, double count) {
        return mode == GbdtMode::HistFirstOrder ? s * s / count : s * s / (count + l2_reg);
    };
    const double half = mode == GbdtMode::Newton ? 0.5 : 1.0;
    const double parent = score(sum_g, static_cast<double>(n));
    RootSplit best;
    for (size_t c = 0; c < x.cols; ++c) {
        std::vector<double> thresholds(n);
        for (size_t r = 0; r < n; ++r) {
            thresholds[r] = x.at(r, c);
        }
        std::sort(thresholds.begin(), thresholds.end());
        thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                         thresholds.end());
        for (double t : thresholds) {
            double g_l = 0.0;
            int n_l = 0;
            for (size_t r = 0; r < n; ++r) {
                if (x.at(r, c) <= t) {
                    g_l += g[r];
                    ++n_l;
                }
            }
            const int n_r = static_cast<int>(n) - n_l;
            if (n_l < min_samples_leaf || n_r < min_samples_leaf) {
                continue;
            }
            const double gain = half * (score(g_l, n_l) + score(sum_g - g_l, n_r) - parent);
            if (gain > best.gain && gain > GbdtModel::kMinGain) {
                best.feature = static_cast<int>(c);
                best.threshold = t;
                best.gain = gain;
            }
        }
    }
    return best;
}

SmallDataset structured_dataset(size_t rows, uint64_t seed) {
    Xoshiro256StarStar rng(seed);
    SmallDataset d;
    d.x = Matrix(rows, 3);
    d.y.resize(rows);
    for (size_t r = 0; r < rows; ++r) {
        d.x.at(r, 0) = rng.uniform(0.0, 6.0);
        d.x.at(r, 1) = rng.uniform(-2.0, 2.0);
        d.x.at(r, 2) = static_cast<double>(rng.below(4));
        d.y[r] = 2.0 * std::sin(d.x.at(r, 0)) + d.x.at(r, 1) + 0.1 * d.x.at(r, 2);
    }
    return d;
}

int leaf_index_for(const GbdtTree& tree, const double* row) {
    int at = 0;
    while (tree.nodes[static_cast<size_t>(at)].feature >= 0) {
        const GbdtNode& node = tree.nodes[static_cast<size_t>(at)];
        at = row[node.feature] <= node.threshold ? node.left : node.right;
    }
    return at;
}

}  // namespace

TEST_CASE("gbdt mode names round trip") {
    CHECK(std::string(qnoise::gbdt_mode_name(GbdtMode::HistFirstOrder)) ==
          "hist-first-order");
    CHECK(std::string(qnoise::gbdt_mode_name(GbdtMode::Newton)) == "newton");
    CHECK(qnoise::gbdt_mode_from_name("hist-first-order") == GbdtMode::HistFirstOrder);
    CHECK(qnoise::gbdt_mode_from_name("newton") == GbdtMode::Newton);
    CHECK_THROWS_AS(qnoise::gbdt_mode_from_name("xgboost"), std::invalid_argument);
}

TEST_CASE("gbdt per-mode defaults") {
    const GbdtConfig hist = qnoise::gbdt_default_config(GbdtMode::HistFirstOrder);
    CHECK(hist.mode == GbdtMode::HistFirstOrder);
    CHECK(hist.learning_rate == 0.1);
    CHECK(hist.iterations == 100);
    CHECK(hist.max_leaves == 31);
    CHECK(hist.max_bins == 255);
    CHECK(hist.min_samples_leaf == 20);

    const GbdtConfig newton = qnoise::gbdt_default_config(GbdtMode::Newton);
    CHECK(newton.mode == GbdtMode::Newton);
    CHECK(newton.learning_rate == 0.3);
    CHECK(newton.max_depth == 6);
    CHECK(newton.l2_reg == 1.0);
}

TEST_CASE("gbdt config validation") {
    GbdtConfig c = qnoise::gbdt_default_config(GbdtMode::HistFirstOrder);
    CHECK_NOTHROW(qnoise::validate_gbdt_config(c));
    c.iterations = 0;  // zero boosting rounds is a valid (base-only) model
    CHECK_NOTHROW(qnoise::validate_gbdt_config(c));

    const auto expect_reject = [](void (*tweak)(GbdtConfig&)) {
        GbdtConfig bad = qnoise::gbdt_default_config(GbdtMode::HistFirstOrder);
        tweak(bad);
        CHECK_THROWS_AS(qnoise::validate_gbdt_config(bad), std::invalid_argument);
    };
    expect_reject([](GbdtConfig& b) { b.iterations = -1; });
    expect_reject([](GbdtConfig& b) { b.learning_rate = 0.0; });
    expect_reject([](GbdtConfig& b) { b.max_leaves = 1; });
    expect_reject([](GbdtConfig& b) { b.max_depth = 0; });
    expect_reject([](GbdtConfig& b) { b.max_bins = 1; });
    expect_reject([](GbdtConfig& b) { b.max_bins = 256; });
    expect_reject([](GbdtConfig& b) { b.min_samples_leaf = 0; });
    expect_reject([](GbdtConfig& b) { b.l2_reg = 0.0; });
}

TEST_CASE("gbdt fit input validation") {
    GbdtConfig config = qnoise::gbdt_default_config(GbdtMode::HistFirstOrder);
    config.iterations = 1;
    GbdtModel model;

    Matrix empty(0, 0);
    CHECK_THROWS_AS(model.fit(empty, {}, config), std::invalid_argument);

    Matrix x(40, 1);
    std::vector<double> y(40, 0.0);
    for (size_t r = 0; r < 40; ++r) {
        x.at(r, 0) = static_cast<double>(r);
        y[r] = static_cast<double>(r % 7);
    }
    std::vector<double> short_y(y.begin(), y.end() - 1);
    CHECK_THROWS_AS(model.fit(x, short_y, config), std::invalid_argument);

    Matrix thin(39, 1);
    std::vector<double> thin_y(39, 0.0);
    for (size_t r = 0; r < 39; ++r) {
        thin.at(r, 0) = static_cast<double>(r);
    }
    CHECK_THROWS_AS(model.fit(thin, thin_y, config), std::invalid_argument);

    std::vector<double> nan_y = y;
    nan_y[3] = std::nan("");
    CHECK_THROWS_AS(model.fit(x, nan_y, config), std::invalid_argument);

    Matrix inf_x = x;
    inf_x.at(5, 0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(model.fit(inf_x, y, config), std::invalid_argument);

    CHECK_THROWS_AS(model.predict_one(x.row(0)), std::logic_error);
    CHECK_NOTHROW(model.fit(x, y, config));
    CHECK(model.fitted());
}

TEST_CASE("gbdt manual tree routing sends value <= threshold left") {
    GbdtTree tree;
    tree.nodes.resize(5);
    tree.nodes[0] = GbdtNode{0, 1.5, 1, 2, 0.0};
    tree.nodes[1] = GbdtNode{-1, 0.0, -1, -1, -2.0};
    tree.nodes[2] = GbdtNode{1, 0.0, 3, 4, 0.0};
    tree.nodes[3] = GbdtNode{-1, 0.0, -1, -1, 5.0};
    tree.nodes[4] = GbdtNode{-1, 0.0, -1, -1, 7.0};

    const double on_edge[] = {1.5, 9.0};
    CHECK(tree.value_for(on_edge) == -2.0);
    const double right_then_left[] = {1.6, 0.0};
    CHECK(tree.value_for(right_then_left) == 5.0);
    const double right_then_right[] = {2.0, 1.0};
    CHECK(tree.value_for(right_then_right) == 7.0);
}

TEST_CASE("gbdt equal-frequency bin edges") {
    CHECK(GbdtModel::feature_bin_edges({3.0, 1.0, 2.0, 1.0}, 4) ==
          std::vector<double>{1.0, 2.0, 3.0});
    CHECK(GbdtModel::feature_bin_edges({3.0, 1.0, 2.0, 1.0}, 2) ==
          std::vector<double>{2.0});
    CHECK(GbdtModel::feature_bin_edges({5.0, 5.0, 5.0, 5.0}, 255) ==
          std::vector<double>{5.0});

    // With fewer rows than bins every distinct value becomes an edge.
    std::vector<double> column;
    Xoshiro256StarStar rng(9);
    for (int i = 0; i < 200; ++i) {
        column.push_back(rng.uniform(0.0, 1.0));
    }
    std::vector<double> expected = column;
    std::sort(expected.begin(), expected.end());
    expected.erase(std::unique(expected.begin(), expected.end()), expected.end());
    CHECK(GbdtModel::feature_bin_edges(column, 255) == expected);
}

TEST_CASE("gbdt first-tree root split matches an exhaustive raw-value scan") {
    for (uint64_t seed = 1; seed <= 20; ++seed) {
        const SmallDataset d = make_dataset(seed);
        for (GbdtMode mode : {GbdtMode::HistFirstOrder, GbdtMode::Newton}) {
            INFO("seed " << seed << " mode " << qnoise::gbdt_mode_name(mode) << " rows "
                         << d.x.rows << " cols " << d.x.cols);
            GbdtConfig config = qnoise::gbdt_default_config(mode);
            config.iterations = 1;
            GbdtModel model;
            model.fit(d.x, d.y, config);
            REQUIRE(model.trees().size() == 1);
            const GbdtNode& root = model.trees()[0].nodes[0];

            const RootSplit expected =
                scan_root_split(d.x, d.y, mode, config.min_samples_leaf, config.l2_reg);
            CHECK(root.feature == expected.feature);
            if (expected.feature >= 0) {
                CHECK(root.threshold == expected.threshold);
            }
        }
    }
}

TEST_CASE("gbdt exact gain ties break toward the lower feature index") {
    // Column 1 duplicates column 0, so every split is available on both
    // features with bitwise-identical gain.
    Xoshiro256StarStar rng(77);
    Matrix x(120, 2);
    std::vector<double> y(120);
    for (size_t r = 0; r < 120; ++r) {
        const double v = rng.uniform(0.0, 4.0);
        x.at(r, 0) = v;
        x.at(r, 1) = v;
        y[r] = v * v + rng.uniform(-0.1, 0.1);
    }
    for (GbdtMode mode : {GbdtMode::HistFirstOrder, GbdtMode::Newton}) {
        GbdtConfig config = qnoise::gbdt_default_config(mode);
        config.iterations = 1;
        GbdtModel model;
        model.fit(x, y, config);
        const GbdtNode& root = model.trees()[0].nodes[0];
        REQUIRE(root.feature >= 0);
        CHECK(root.feature == 0);
        const RootSplit expected =
            scan_root_split(x, y, mode, config.min_samples_leaf, config.l2_reg);
        CHECK(expected.feature == 0);
        CHECK(root.threshold == expected.threshold);
    }
}

TEST_CASE("gbdt zero iterations predicts the label mean") {
    for (uint64_t seed : {1ULL, 7ULL, 15ULL}) {
        const SmallDataset d = make_dataset(seed);
        const double mean = mean_of(d.y);
        for (GbdtMode mode : {GbdtMode::HistFirstOrder, GbdtMode::Newton}) {
            GbdtConfig config = qnoise::gbdt_default_config(mode);
            config.iterations = 0;
            GbdtModel model;
            model.fit(d.x, d.y, config);
            CHECK(model.trees().empty());
            CHECK(model.base() == Catch::Approx(mean).margin(1e-12));
            for (size_t r = 0; r < std::min<size_t>(d.x.rows, 8); ++r) {
                CHECK(std::fabs(model.predict_one(d.x.row(r)) - mean) <= 1e-12);
            }
        }
    }
}

TEST_CASE("gbdt training error drops as iterations are added") {
    const SmallDataset d = structured_dataset(200, 5);
    for (GbdtMode mode : {GbdtMode::HistFirstOrder, GbdtMode::Newton}) {
        GbdtConfig config = qnoise::gbdt_default_config(mode);
        config.iterations = 0;
        GbdtModel base_only;
        base_only.fit(d.x, d.y, config);
        const double mse0 = train_mse(base_only, d.x, d.y);

        config.iterations = 10;
        GbdtModel ten;
        ten.fit(d.x, d.y, config);
        const double mse10 = train_mse(ten, d.x, d.y);

        config.iterations = 50;
        GbdtModel fifty;
        fifty.fit(d.x, d.y, config);
        const double mse50 = train_mse(fifty, d.x, d.y);

        INFO(qnoise::gbdt_mode_name(mode) << " mse " << mse0 << " -> " << mse10 << " -> "
                                          << mse50);
        CHECK(mse10 < mse0);
        CHECK(mse50 <= mse10 + 1e-12);
    }
}

TEST_CASE("gbdt growth limits are honored") {
    const SmallDataset d = structured_dataset(200, 11);

    GbdtConfig hist = qnoise::gbdt_default_config(GbdtMode::HistFirstOrder);
    hist.iterations = 3;
    hist.max_leaves = 4;
    GbdtModel hist_model;
    hist_model.fit(d.x, d.y, hist);
    for (const GbdtTree& tree : hist_model.trees()) {
        int leaves = 0;
        for (const GbdtNode& node : tree.nodes) {
            if (node.feature < 0) {
                ++leaves;
            }
        }
        CHECK(leaves >= 2);
        CHECK(leaves <= hist.max_leaves);
    }

    GbdtConfig newton = qnoise::gbdt_default_config(GbdtMode::Newton);
    newton.iterations = 3;
    newton.max_depth = 2;
    GbdtModel newton_model;
    newton_model.fit(d.x, d.y, newton);
    for (const GbdtTree& tree : newton_model.trees()) {
        // Walk depths from the root; no node may sit deeper than max_depth.
        std::vector<int> depth(tree.nodes.size(), 0);
        for (size_t i = 0; i < tree.nodes.size(); ++i) {
            const GbdtNode& node = tree.nodes[i];
            if (node.feature >= 0) {
                depth[static_cast<size_t>(node.left)] = depth[i] + 1;
                depth[static_cast<size_t>(node.right)] = depth[i] + 1;
                CHECK(depth[i] < newton.max_depth);
            }
            CHECK(depth[i] <= newton.max_depth);
        }
    }
}

TEST_CASE("gbdt every leaf keeps at least min_samples_leaf training rows") {
    const SmallDataset d = structured_dataset(200, 3);
    GbdtConfig config = qnoise::gbdt_default_config(GbdtMode::HistFirstOrder);
    config.iterations = 3;
    GbdtModel model;
    model.fit(d.x, d.y, config);
    for (const GbdtTree& tree : model.trees()) {
        std::map<int, int> counts;
        for (size_t r = 0; r < d.x.rows; ++r) {
            ++counts[leaf_index_for(tree, d.x.row(r))];
        }
        int total = 0;
        for (const auto& [leaf, count] : counts) {
            CHECK(count >= config.min_samples_leaf);
            total += count;
        }
        CHECK(total == static_cast<int>(d.x.rows));
    }
}

TEST_CASE("gbdt fit is deterministic and ignores the seed argument") {
    const SmallDataset d = structured_dataset(150, 21);
    GbdtConfig config = qnoise::gbdt_default_config(GbdtMode::Newton);
    config.iterations = 5;

    GbdtModel a;
    a.fit(d.x, d.y, config, 0);
    GbdtModel b;
    b.fit(d.x, d.y, config, 0xabcdef);

    REQUIRE(a.trees().size() == b.trees().size());
    CHECK(a.base() == b.base());
    for (size_t r = 0; r < d.x.rows; ++r) {
        CHECK(a.predict_one(d.x.row(r)) == b.predict_one(d.x.row(r)));
    }
}

TEST_CASE("gbdt restore reproduces fitted predictions exactly") {
    const SmallDataset d = structured_dataset(160, 8);
    GbdtConfig config = qnoise::gbdt_default_config(GbdtMode::HistFirstOrder);
    config.iterations = 4;
    GbdtModel fitted;
    fitted.fit(d.x, d.y, config);

    GbdtModel loaded;
    loaded.restore(fitted.config(), fitted.base(), fitted.trees(), fitted.bin_edges());
    CHECK(loaded.fitted());
    CHECK(loaded.parameter_count() == fitted.parameter_count());
    const std::vector<double> want = fitted.predict(d.x);
    const std::vector<double> got = loaded.predict(d.x);
    REQUIRE(want.size() == got.size());
    for (size_t i = 0; i < want.size(); ++i) {
        CHECK(want[i] == got[i]);
    }
}

TEST_CASE("gbdt parameter count grows with the ensemble") {
    const SmallDataset d = structured_dataset(120, 2);
    GbdtConfig config = qnoise::gbdt_default_config(GbdtMode::HistFirstOrder);
    config.iterations = 0;
    GbdtModel model;
    model.fit(d.x, d.y, config);
    CHECK(model.parameter_count() == 1);

    config.iterations = 2;
    model.fit(d.x, d.y, config);
    size_t expected = 1;
    for (const GbdtTree& tree : model.trees()) {
        expected += tree.nodes.size();
    }
    CHECK(model.parameter_count() == expected);
    CHECK(model.parameter_count() > 1);
}
