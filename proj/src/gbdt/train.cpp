#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "retail/core/error.hpp"
#include "retail/gbdt/model.hpp"

namespace retail::gbdt {

namespace {

constexpr double kMeanOffset = 1e-8;

double link_inverse(Objective objective, double score) {
    return objective == Objective::poisson ? std::exp(score) : score;
}

void record(TrainingLog* log, Objective objective, std::span<const double> score, std::span<const double> target) {
    if (!log) {
        return;
    }
    double sq = 0.0;
    double loss = 0.0;
    for (std::size_t i = 0; i < score.size(); ++i) {
        const double pred = link_inverse(objective, score[i]);
        sq += (pred - target[i]) * (pred - target[i]);
        loss += objective == Objective::poisson ? pred - target[i] * score[i]
                                                : 0.5 * (score[i] - target[i]) * (score[i] - target[i]);
    }
    const double n = static_cast<double>(score.size());
    log->rmse.push_back(std::sqrt(sq / n));
    log->loss.push_back(loss / n);
}

}  // namespace

std::string_view objective_name(Objective objective) {
    return objective == Objective::poisson ? "poisson" : "squared";
}

Objective parse_objective(std::string_view name) {
    if (name == "poisson") {
        return Objective::poisson;
    }
    if (name == "squared" || name == "regression" || name == "l2") {
        return Objective::squared;
    }
    throw InvalidArgument("unknown objective '" + std::string(name) + "'");
}

void validate(const GbdtParams& p) {
    auto require = [](bool ok, const char* what) {
        if (!ok) {
            throw InvalidArgument(std::string("gbdt parameter out of range: ") + what);
        }
    };
    require(p.learning_rate > 0.0 && p.learning_rate <= 1.0, "learning_rate must be in (0, 1]");
    require(p.num_iterations >= 0, "num_iterations must be non-negative");
    require(p.bagging_frequency >= 0, "bagging_frequency must be non-negative");
    require(p.min_data_in_leaf >= 1, "min_data_in_leaf must be positive");
    require(p.max_leaves >= 1, "max_leaves must be positive");
    require(p.max_bins >= 2 && p.max_bins <= 65000, "max_bins must be in [2, 65000]");
    require(p.goss_a >= 0.0 && p.goss_a <= 1.0 && p.goss_b >= 0.0 && p.goss_b <= 1.0, "goss fractions in [0, 1]");
    require(p.goss_a + p.goss_b <= 1.0 + 1e-12, "goss_a + goss_b must not exceed 1");
    require(p.efb_max_conflict >= 0, "efb_max_conflict must be non-negative");
}

GbdtModel train(std::span<const FeatureColumn> columns, std::span<const double> target, const GbdtParams& params,
                TrainingLog* log) {
    validate(params);
    const std::size_t n = target.size();
    if (n == 0 || columns.empty()) {
        throw InvalidArgument("gbdt training needs at least one row and one feature");
    }
    if (n > std::numeric_limits<std::uint32_t>::max()) {
        throw InvalidArgument("gbdt training supports at most 2^32 - 1 rows");
    }
    double total = 0.0;
    for (const double y : target) {
        if (!std::isfinite(y)) {
            throw InvalidArgument("gbdt targets must be finite");
        }
        if (params.objective == Objective::poisson && y < 0.0) {
            throw InvalidArgument("poisson objective needs non-negative targets");
        }
        total += y;
    }
    for (const auto& c : columns) {
        if (c.values.size() != n) {
            throw InvalidArgument("feature column '" + c.name + "' and the target differ in length");
        }
    }

    GbdtModel model;
    model.objective = params.objective;
    const double mean = total / static_cast<double>(n);
    model.base_score = params.objective == Objective::poisson ? std::log(mean + kMeanOffset) : mean;
    for (const auto& c : columns) {
        model.feature_names.push_back(c.name);
    }

    const BinnedData binned(columns, params.max_bins);
    model.bins = binned.mappers();
    std::vector<Bundle> bundles;
    if (params.enable_efb) {
        bundles = efb_bundle(binned, static_cast<std::size_t>(params.efb_max_conflict));
    } else {
        for (std::size_t f = 0; f < binned.features(); ++f) {
            bundles.push_back({{f}, {0}});
        }
    }
    const TreeLearner learner(binned, std::move(bundles), params.num_threads);

    std::vector<double> score(n, model.base_score);
    std::vector<double> grad(n);
    std::vector<double> hess(n);
    std::vector<double> wgrad;
    std::vector<double> whess;
    std::vector<std::uint32_t> all_rows(n);
    for (std::size_t i = 0; i < n; ++i) {
        all_rows[i] = static_cast<std::uint32_t>(i);
    }
    const bool goss = params.bagging_frequency > 0;
    GossSample sample;
    std::vector<std::uint8_t> in_sample;
    std::vector<std::uint32_t> out_of_sample;
    std::mt19937_64 rng(params.seed);
    record(log, params.objective, score, target);

    model.trees.reserve(static_cast<std::size_t>(params.num_iterations));
    for (int it = 0; it < params.num_iterations; ++it) {
        if (params.objective == Objective::poisson) {
            for (std::size_t i = 0; i < n; ++i) {
                const double mu = std::exp(score[i]);
                grad[i] = mu - target[i];
                hess[i] = mu;
            }
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                grad[i] = score[i] - target[i];
                hess[i] = 1.0;
            }
        }

        std::span<const std::uint32_t> rows = all_rows;
        std::span<const double> g = grad;
        std::span<const double> h = hess;
        if (goss) {
            if (it % params.bagging_frequency == 0) {
                sample = goss_sample(grad, params.goss_a, params.goss_b, rng);
                in_sample.assign(n, 0);
                for (const auto r : sample.rows) {
                    in_sample[r] = 1;
                }
                out_of_sample.clear();
                for (std::size_t i = 0; i < n; ++i) {
                    if (!in_sample[i]) {
                        out_of_sample.push_back(static_cast<std::uint32_t>(i));
                    }
                }
                wgrad.assign(n, 0.0);
                whess.assign(n, 0.0);
            }
            for (std::size_t k = 0; k < sample.rows.size(); ++k) {
                const auto r = sample.rows[k];
                wgrad[r] = grad[r] * sample.weights[k];
                whess[r] = hess[r] * sample.weights[k];
            }
            rows = sample.rows;
            g = wgrad;
            h = whess;
        }

        auto grown = learner.grow(rows, g, h, params.max_leaves, params.min_data_in_leaf);
        for (auto& node : grown.tree.nodes) {
            if (node.is_leaf()) {
                node.value *= params.learning_rate;
                if (params.objective == Objective::poisson) {
                    node.value = std::clamp(node.value, -kPoissonLeafCap, kPoissonLeafCap);
                }
            }
        }
        for (std::size_t l = 0; l < grown.leaf_nodes.size(); ++l) {
            const double v = grown.tree.nodes[static_cast<std::size_t>(grown.leaf_nodes[l])].value;
            for (std::size_t k = grown.leaf_begin[l]; k < grown.leaf_begin[l + 1]; ++k) {
                score[grown.order[k]] += v;
            }
        }
        if (rows.size() < n) {
            TreeRouter(grown.tree, binned).add_scores(out_of_sample, score);
        }
        model.trees.push_back(std::move(grown.tree));
        record(log, params.objective, score, target);
    }
    return model;
}

double predict_score(const GbdtModel& model, std::span<const std::optional<double>> row) {
    if (row.size() != model.features()) {
        throw InvalidArgument("predict: row has " + std::to_string(row.size()) + " values, model expects " +
                              std::to_string(model.features()));
    }
    double score = model.base_score;
    for (const auto& tree : model.trees) {
        std::size_t at = 0;
        while (!tree.nodes[at].is_leaf()) {
            const auto& node = tree.nodes[at];
            const auto f = static_cast<std::size_t>(node.feature);
            const auto& v = row[f];
            bool left = false;
            if (!v || std::isnan(*v)) {
                left = node.missing_left;
            } else if (model.bins[f].kind == ColumnKind::numeric) {
                left = *v <= node.threshold;
            } else {
                left = goes_left(node, model.bins[f].bin(*v));
            }
            at = static_cast<std::size_t>(left ? node.left : node.right);
        }
        score += tree.nodes[at].value;
    }
    return score;
}

double predict_one(const GbdtModel& model, std::span<const std::optional<double>> row) {
    return link_inverse(model.objective, predict_score(model, row));
}

std::vector<double> predict(const GbdtModel& model, std::span<const FeatureColumn> columns) {
    std::unordered_map<std::string, std::size_t> by_name;
    for (std::size_t c = 0; c < columns.size(); ++c) {
        by_name.emplace(columns[c].name, c);
    }
    std::vector<const NullableColumn*> source;
    for (const auto& name : model.feature_names) {
        const auto it = by_name.find(name);
        if (it == by_name.end()) {
            throw InvalidArgument("predict: input has no column '" + name + "'");
        }
        source.push_back(&columns[it->second].values);
    }
    const std::size_t n = source.empty() ? 0 : source[0]->size();
    for (const auto* col : source) {
        if (col->size() != n) {
            throw InvalidArgument("predict: input columns differ in length");
        }
    }

    std::vector<double> out(n);
    std::vector<std::optional<double>> row(model.features());
    std::size_t unknown = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t f = 0; f < row.size(); ++f) {
            row[f] = source[f]->get(i);
            if (row[f] && model.bins[f].kind == ColumnKind::categorical && model.bins[f].bin(*row[f]) == kMissingBin) {
                ++unknown;
            }
        }
        out[i] = predict_one(model, row);
    }
    if (unknown > 0) {
        spdlog::warn("predict: {} categorical values were not seen in training and were routed as missing", unknown);
    }
    return out;
}

std::map<std::string, std::size_t> feature_importance(const GbdtModel& model) {
    std::map<std::string, std::size_t> counts;
    for (const auto& name : model.feature_names) {
        counts[name] = 0;
    }
    for (const auto& tree : model.trees) {
        for (const auto& node : tree.nodes) {
            if (!node.is_leaf()) {
                ++counts[model.feature_names[static_cast<std::size_t>(node.feature)]];
            }
        }
    }
    return counts;
}

}  // namespace retail::gbdt
