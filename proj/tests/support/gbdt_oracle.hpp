#pragma once

// Brute-force references for the boosted-tree tests. They work on raw values and row lists,
// never on histograms.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "retail/core/column.hpp"
#include "retail/gbdt/model.hpp"

namespace retail::testing {

struct SmallDataset {
    std::vector<FeatureColumn> columns;
    std::vector<double> target;
};

/// Up to `max_rows` rows and `max_features` numeric features on coarse grids, some missing.
inline SmallDataset random_small_dataset(std::mt19937_64& rng, std::size_t max_rows = 64,
                                         std::size_t max_features = 4) {
    std::uniform_int_distribution<std::size_t> rows_dist(2, max_rows);
    std::uniform_int_distribution<std::size_t> feat_dist(1, max_features);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, 1.0);
    SmallDataset d;
    const std::size_t n = rows_dist(rng);
    const std::size_t features = feat_dist(rng);
    for (std::size_t f = 0; f < features; ++f) {
        FeatureColumn c;
        c.name = "x" + std::to_string(f);
        const int levels = 2 + static_cast<int>(rng() % 12);
        const double missing_rate = (rng() % 3 == 0) ? 0.15 : 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (unit(rng) < missing_rate) {
                c.values.push_back(std::nullopt);
            } else {
                c.values.push_back(std::floor(unit(rng) * levels) * 0.5 - 1.0);
            }
        }
        d.columns.push_back(std::move(c));
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double x = d.columns[0].values.has(i) ? d.columns[0].values.values[i] : 0.7;
        d.target.push_back(3.0 * x + noise(rng));
    }
    return d;
}

struct ExhaustiveSplit {
    std::size_t feature = 0;
    double threshold = 0.0;  // largest value going left
    bool missing_left = false;
    double gain = 0.0;
    std::vector<std::size_t> left_rows;
};

/// Every (feature, gap between distinct values, missing side) partition, sums taken straight
/// from the rows; same gain formula, admissibility and scan order as the documented search.
inline std::optional<ExhaustiveSplit> exhaustive_best_split(const std::vector<FeatureColumn>& columns,
                                                           const std::vector<double>& grad,
                                                           const std::vector<double>& hess, int min_data) {
    const std::size_t n = grad.size();
    auto score = [](double g, double h) { return g * g / (h + gbdt::kLambda); };
    double g_all = 0.0;
    double h_all = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        g_all += grad[i];
        h_all += hess[i];
    }
    const double parent = score(g_all, h_all);
    std::optional<ExhaustiveSplit> best;
    for (std::size_t f = 0; f < columns.size(); ++f) {
        const auto& col = columns[f].values;
        std::set<double> distinct;
        bool any_missing = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (col.has(i)) {
                distinct.insert(col.values[i]);
            } else {
                any_missing = true;
            }
        }
        std::vector<double> values(distinct.begin(), distinct.end());
        for (std::size_t t = 0; t + 1 < values.size(); ++t) {
            for (bool missing_left : {false, true}) {
                if (missing_left && !any_missing) {
                    continue;
                }
                std::vector<std::size_t> left;
                double gl = 0.0, hl = 0.0, gr = 0.0, hr = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const bool goes_left = col.has(i) ? col.values[i] <= values[t] : missing_left;
                    if (goes_left) {
                        left.push_back(i);
                        gl += grad[i];
                        hl += hess[i];
                    } else {
                        gr += grad[i];
                        hr += hess[i];
                    }
                }
                const std::size_t nl = left.size();
                if (nl < static_cast<std::size_t>(min_data) || n - nl < static_cast<std::size_t>(min_data)) {
                    continue;
                }
                const double gain = score(gl, hl) + score(gr, hr) - parent;
                if (gain > 0.0 && (!best || gain > best->gain)) {
                    best = ExhaustiveSplit{f, values[t], missing_left, gain, left};
                }
            }
        }
    }
    return best;
}

/// Plain recursive walk over raw values; unseen categories follow the missing branch.
inline double reference_score(const gbdt::GbdtModel& model, const std::vector<std::optional<double>>& row) {
    std::function<double(const gbdt::Tree&, int)> walk = [&](const gbdt::Tree& tree, int at) -> double {
        const auto& node = tree.nodes[static_cast<std::size_t>(at)];
        if (node.feature < 0) {
            return node.value;
        }
        const auto& value = row[static_cast<std::size_t>(node.feature)];
        const auto& bins = model.bins[static_cast<std::size_t>(node.feature)];
        bool left;
        if (!value) {
            left = node.missing_left;
        } else if (bins.kind == ColumnKind::numeric) {
            left = *value <= node.threshold;
        } else if (std::find(bins.categories.begin(), bins.categories.end(), *value) == bins.categories.end()) {
            left = node.missing_left;
        } else {
            left = std::find(node.left_categories.begin(), node.left_categories.end(), *value) !=
                   node.left_categories.end();
        }
        return walk(tree, left ? node.left : node.right);
    };
    double score = model.base_score;
    for (const auto& tree : model.trees) {
        score += walk(tree, 0);
    }
    return score;
}

/// Every set partition of {0..k-1}, as a list of blocks.
inline void for_each_partition(std::size_t k, const std::function<void(const std::vector<std::vector<std::size_t>>&)>& fn) {
    std::vector<std::vector<std::size_t>> blocks;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == k) {
            fn(blocks);
            return;
        }
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            blocks[b].push_back(i);
            rec(i + 1);
            blocks[b].pop_back();
        }
        blocks.push_back({i});
        rec(i + 1);
        blocks.pop_back();
    };
    rec(0);
}

}  // namespace retail::testing
