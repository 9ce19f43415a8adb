#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "xfire/features.hpp"

namespace xfire {

struct TreeNode {
    int feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;  // x[feature] <= threshold
    int right = -1;
    int vote = 0; // majority class at this node
};

struct DecisionTree {
    std::vector<TreeNode> nodes;

    int predict(std::span<const double> row) const;
};

struct ForestModel {
    std::vector<DecisionTree> trees;
    int n_trees = 0;
    int max_depth = 0;
    int features_per_split = 0;
    std::size_t n_features = 0;

    /// Fraction of trees voting attack.
    double score(std::span<const double> row) const;
    std::vector<double> predict_scores(const FeatureMatrix& rows) const;

    nlohmann::json to_json() const;
    static ForestModel from_json(const nlohmann::json& j);
};

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0; // Gini impurity decrease
};

/// Best Gini split over the given rows (duplicates allowed) and candidate
/// features. Thresholds are midpoints between consecutive distinct values;
/// ties keep the first candidate in feature order, then threshold order.
std::optional<Split> best_split(const FeatureMatrix& data, std::span<const std::size_t> rows,
                                std::span<const std::size_t> features);

struct ForestParams {
    int n_trees = 100;
    int max_depth = 12; // <= 0 means unlimited
    int features_per_split = 0; // 0 means ceil(sqrt(d))
    bool bootstrap = true;
};

/// Trees are grown independently from per-tree derived seeds, so the result
/// does not depend on how training is spread across threads.
ForestModel train_random_forest(const FeatureMatrix& train, const ForestParams& params, std::uint64_t seed);

} // namespace xfire
