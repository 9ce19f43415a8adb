#include "xfire/forest.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

#include "xfire/rng.hpp"

namespace xfire {

namespace {

double gini(double pos, double n) {
    if (n <= 0.0) return 0.0;
    const double p = pos / n;
    return 2.0 * p * (1.0 - p);
}

struct Grower {
    const FeatureMatrix& data;
    const ForestParams& params;
    std::size_t per_split;
    SplitMix rng;
    DecisionTree tree;

    int grow(std::vector<std::size_t>& rows, int depth) {
        std::size_t pos = 0;
        for (auto r : rows) pos += static_cast<std::size_t>(data.labels[r] != 0);
        const int id = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back({});
        tree.nodes[static_cast<std::size_t>(id)].vote = 2 * pos > rows.size() ? 1 : 0;
        const bool pure = pos == 0 || pos == rows.size();
        if (pure || rows.size() < 2 || (params.max_depth > 0 && depth >= params.max_depth)) return id;

        // Partial Fisher-Yates draw of the candidate features, then sorted so
        // tie-breaking follows feature order.
        std::vector<std::size_t> features(data.cols);
        std::iota(features.begin(), features.end(), 0);
        for (std::size_t i = 0; i < per_split; ++i)
            std::swap(features[i], features[i + rng.below(data.cols - i)]);
        features.resize(per_split);
        std::sort(features.begin(), features.end());

        auto split = best_split(data, rows, features);
        if (!split || !(split->gain > 0.0)) return id;

        std::vector<std::size_t> left, right;
        for (auto r : rows) (data.at(r, static_cast<std::size_t>(split->feature)) <= split->threshold ? left : right).push_back(r);
        rows.clear();
        rows.shrink_to_fit();
        const int l = grow(left, depth + 1);
        const int rr = grow(right, depth + 1);
        auto& node = tree.nodes[static_cast<std::size_t>(id)];
        node.feature = split->feature;
        node.threshold = split->threshold;
        node.left = l;
        node.right = rr;
        return id;
    }
};

DecisionTree grow_tree(const FeatureMatrix& train, const ForestParams& params, std::size_t per_split,
                       std::uint64_t tree_seed) {
    Grower g{train, params, per_split, SplitMix(tree_seed), {}};
    std::vector<std::size_t> rows(train.rows);
    if (params.bootstrap) {
        SplitMix boot(derive_seed(tree_seed, {1}));
        for (auto& r : rows) r = boot.below(train.rows);
    } else {
        std::iota(rows.begin(), rows.end(), 0);
    }
    g.grow(rows, 0);
    return std::move(g.tree);
}

} // namespace

int DecisionTree::predict(std::span<const double> row) const {
    int i = 0;
    while (true) {
        const auto& n = nodes[static_cast<std::size_t>(i)];
        if (n.feature < 0) return n.vote;
        i = row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
}

double ForestModel::score(std::span<const double> row) const {
    if (row.size() != n_features)
        throw std::invalid_argument(fmt::format("row has {} features, forest expects {}", row.size(), n_features));
    int votes = 0;
    for (const auto& t : trees) votes += t.predict(row);
    return static_cast<double>(votes) / static_cast<double>(trees.size());
}

std::vector<double> ForestModel::predict_scores(const FeatureMatrix& rows) const {
    if (rows.cols != n_features)
        throw std::invalid_argument(fmt::format("matrix has {} features, forest expects {}", rows.cols, n_features));
    std::vector<double> out(rows.rows);
    for (std::size_t r = 0; r < rows.rows; ++r) out[r] = score(rows.row(r));
    return out;
}

nlohmann::json ForestModel::to_json() const {
    nlohmann::json trees_json = nlohmann::json::array();
    for (const auto& t : trees) {
        nlohmann::json nodes = nlohmann::json::array();
        for (const auto& n : t.nodes) nodes.push_back({n.feature, n.threshold, n.left, n.right, n.vote});
        trees_json.push_back(std::move(nodes));
    }
    return {{"type", "random_forest"},
            {"n_trees", n_trees},
            {"max_depth", max_depth},
            {"features_per_split", features_per_split},
            {"n_features", n_features},
            {"trees", std::move(trees_json)}};
}

ForestModel ForestModel::from_json(const nlohmann::json& j) {
    if (j.at("type") != "random_forest") throw std::invalid_argument("not a random_forest model");
    ForestModel m;
    m.n_trees = j.at("n_trees").get<int>();
    m.max_depth = j.at("max_depth").get<int>();
    m.features_per_split = j.at("features_per_split").get<int>();
    m.n_features = j.at("n_features").get<std::size_t>();
    for (const auto& tj : j.at("trees")) {
        DecisionTree t;
        for (const auto& nj : tj)
            t.nodes.push_back({nj.at(0).get<int>(), nj.at(1).get<double>(), nj.at(2).get<int>(),
                               nj.at(3).get<int>(), nj.at(4).get<int>()});
        m.trees.push_back(std::move(t));
    }
    return m;
}

std::optional<Split> best_split(const FeatureMatrix& data, std::span<const std::size_t> rows,
                                std::span<const std::size_t> features) {
    const double n = static_cast<double>(rows.size());
    double total_pos = 0.0;
    for (auto r : rows) total_pos += data.labels[r] != 0 ? 1.0 : 0.0;
    const double parent = gini(total_pos, n);

    std::optional<Split> best;
    std::vector<std::pair<double, int>> col(rows.size());
    for (auto f : features) {
        for (std::size_t i = 0; i < rows.size(); ++i) col[i] = {data.at(rows[i], f), data.labels[rows[i]] != 0};
        std::sort(col.begin(), col.end());
        double left_pos = 0.0;
        for (std::size_t i = 0; i + 1 < col.size(); ++i) {
            left_pos += col[i].second;
            if (col[i].first == col[i + 1].first) continue;
            const double nl = static_cast<double>(i + 1);
            const double nr = n - nl;
            const double child = (nl * gini(left_pos, nl) + nr * gini(total_pos - left_pos, nr)) / n;
            const double gain = parent - child;
            if (!best || gain > best->gain)
                best = Split{static_cast<int>(f), 0.5 * (col[i].first + col[i + 1].first), gain};
        }
    }
    return best;
}

ForestModel train_random_forest(const FeatureMatrix& train, const ForestParams& params, std::uint64_t seed) {
    if (params.n_trees < 1) throw std::invalid_argument("n_trees must be at least 1");
    if (!train.has_both_classes()) throw std::invalid_argument("forest training needs both classes");
    if (train.cols == 0) throw std::invalid_argument("no features");
    std::size_t per_split = params.features_per_split > 0
                                ? static_cast<std::size_t>(params.features_per_split)
                                : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(train.cols))));
    per_split = std::min(per_split, train.cols);

    ForestModel model;
    model.n_trees = params.n_trees;
    model.max_depth = params.max_depth;
    model.features_per_split = static_cast<int>(per_split);
    model.n_features = train.cols;
    model.trees.resize(static_cast<std::size_t>(params.n_trees));

    const std::size_t workers =
        std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, static_cast<std::size_t>(params.n_trees));
    std::vector<std::future<void>> jobs;
    for (std::size_t w = 0; w < workers; ++w) {
        jobs.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t t = w; t < model.trees.size(); t += workers)
                model.trees[t] = grow_tree(train, params, per_split, derive_seed(seed, {t}));
        }));
    }
    for (auto& j : jobs) j.get();
    return model;
}

} // namespace xfire
