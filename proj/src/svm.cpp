#include "xfire/svm.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "xfire/rng.hpp"

namespace xfire {

double LinearSvmModel::score(std::span<const double> row) const {
    if (row.size() != weights.size())
        throw std::invalid_argument(fmt::format("row has {} features, model expects {}", row.size(), weights.size()));
    return std::inner_product(row.begin(), row.end(), weights.begin(), bias);
}

std::vector<double> LinearSvmModel::predict_scores(const FeatureMatrix& rows) const {
    if (rows.cols != weights.size())
        throw std::invalid_argument(fmt::format("matrix has {} features, model expects {}", rows.cols, weights.size()));
    std::vector<double> out(rows.rows);
    for (std::size_t r = 0; r < rows.rows; ++r) out[r] = score(rows.row(r));
    return out;
}

nlohmann::json LinearSvmModel::to_json() const {
    return {{"type", "linear_svm"},
            {"weights", weights},
            {"bias", bias},
            {"regularization", regularization},
            {"trained_epochs", trained_epochs}};
}

LinearSvmModel LinearSvmModel::from_json(const nlohmann::json& j) {
    if (j.at("type") != "linear_svm") throw std::invalid_argument("not a linear_svm model");
    LinearSvmModel m;
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    m.regularization = j.at("regularization").get<double>();
    m.trained_epochs = j.at("trained_epochs").get<int>();
    return m;
}

LinearSvmModel train_linear_svm(const FeatureMatrix& train, double regularization, int epochs, std::uint64_t seed) {
    if (!train.has_both_classes()) throw std::invalid_argument("SVM training needs both classes");
    if (!(regularization > 0.0)) throw std::invalid_argument("regularization must be positive");
    if (epochs < 1) throw std::invalid_argument("epochs must be at least 1");

    LinearSvmModel m;
    m.weights.assign(train.cols, 0.0);
    m.regularization = regularization;
    std::vector<std::size_t> order(train.rows);
    std::iota(order.begin(), order.end(), 0);
    SplitMix rng(seed);
    double t = 0.0;
    for (int epoch = 0; epoch < epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (auto r : order) {
            t += 1.0;
            const double eta = 1.0 / (regularization * t);
            const double y = train.labels[r] ? 1.0 : -1.0;
            const auto x = train.row(r);
            const double margin = y * m.score(x);
            const double shrink = 1.0 - eta * regularization;
            for (auto& w : m.weights) w *= shrink;
            if (margin < 1.0) {
                for (std::size_t c = 0; c < x.size(); ++c) m.weights[c] += eta * y * x[c];
                m.bias += eta * y;
            }
        }
    }
    m.trained_epochs = epochs;
    return m;
}

} // namespace xfire
