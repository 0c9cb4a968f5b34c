#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "retail/core/column.hpp"
#include "retail/gbdt/binning.hpp"
#include "retail/gbdt/params.hpp"
#include "retail/gbdt/tree.hpp"

namespace retail::gbdt {

struct GbdtModel {
    Objective objective = Objective::poisson;
    double base_score = 0.0;
    std::vector<Tree> trees;  // leaf values already scaled by the learning rate
    std::vector<std::string> feature_names;
    std::vector<BinMapper> bins;  // per feature

    std::size_t features() const { return feature_names.size(); }
};

/// Per-round training history; entry 0 is the model before the first tree.
struct TrainingLog {
    std::vector<double> rmse;  // prediction space, every training row
    std::vector<double> loss;  // mean objective: e^f - y f (poisson) or (f - y)^2 / 2 (squared)
};

/// Boosts `params.num_iterations` trees. Throws InvalidArgument on empty input, mismatched
/// lengths, non-finite targets, or negative targets under the Poisson objective.
GbdtModel train(std::span<const FeatureColumn> columns, std::span<const double> target, const GbdtParams& params,
                TrainingLog* log = nullptr);

/// Score-space prediction for one row of raw values in model feature order.
double predict_score(const GbdtModel& model, std::span<const std::optional<double>> row);
/// Target-space prediction for one row of raw values in model feature order.
double predict_one(const GbdtModel& model, std::span<const std::optional<double>> row);

/// Target-space predictions. Columns are matched to model features by name; a missing feature
/// throws InvalidArgument. Categorical ids not seen in training route as missing, with one
/// warning per call.
std::vector<double> predict(const GbdtModel& model, std::span<const FeatureColumn> columns);

/// Internal-node count per feature over all trees.
std::map<std::string, std::size_t> feature_importance(const GbdtModel& model);

/// Versioned JSON document. Reading checks the version and structure (ParseError on mismatch).
std::string to_json(const GbdtModel& model);
GbdtModel from_json(const std::string& text);
void save_model(const GbdtModel& model, const std::string& path);
GbdtModel load_model(const std::string& path);

}  // namespace retail::gbdt
