#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "xfire/features.hpp"

namespace xfire {

struct LinearSvmModel {
    std::vector<double> weights;
    double bias = 0.0;
    double regularization = 1.0;
    int trained_epochs = 0;

    /// Signed margin w.x + b.
    double score(std::span<const double> row) const;
    std::vector<double> predict_scores(const FeatureMatrix& rows) const;

    nlohmann::json to_json() const;
    static LinearSvmModel from_json(const nlohmann::json& j);
};

/// Primal subgradient descent on lambda/2 |w|^2 + mean hinge loss, one sample
/// per step in a seeded shuffled order, step 1/(lambda t). The bias is not
/// regularized.
LinearSvmModel train_linear_svm(const FeatureMatrix& train, double regularization, int epochs, std::uint64_t seed);

} // namespace xfire
