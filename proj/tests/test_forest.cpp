#include <catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "xfire/forest.hpp"
#include "xfire/roc.hpp"

using namespace xfire;
using Catch::Approx;

namespace {

FeatureMatrix matrix(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels) {
    FeatureMatrix m;
    m.rows = rows.size();
    m.cols = rows.front().size();
    for (const auto& r : rows) m.values.insert(m.values.end(), r.begin(), r.end());
    m.labels = labels;
    for (std::size_t c = 0; c < m.cols; ++c) m.column_manifest.push_back(LinkId{static_cast<int>(c)});
    m.times.assign(m.rows, 0.0);
    return m;
}

FeatureMatrix random_set(std::size_t n, std::size_t d, std::uint64_t seed, double signal = 1.0) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> g(0, 1);
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (std::size_t i = 0; i < n; ++i) {
        const int y = static_cast<int>(i % 2);
        std::vector<double> r(d);
        for (std::size_t c = 0; c < d; ++c) r[c] = g(gen) + (c < 2 ? signal * y : 0.0);
        rows.push_back(r);
        labels.push_back(y);
    }
    return matrix(rows, labels);
}

double gini(const std::vector<int>& ys) {
    if (ys.empty()) return 0;
    const double p = static_cast<double>(std::count(ys.begin(), ys.end(), 1)) / ys.size();
    return 1 - p * p - (1 - p) * (1 - p);
}

// Every feature, every midpoint between distinct values, impurity by direct
// counting. Strict improvement keeps the first of equal candidates.
Split exhaustive_split(const FeatureMatrix& m) {
    std::vector<int> all(m.labels.begin(), m.labels.end());
    const double parent = gini(all);
    Split best;
    best.gain = -1;
    for (std::size_t f = 0; f < m.cols; ++f) {
        std::set<double> vals;
        for (std::size_t r = 0; r < m.rows; ++r) vals.insert(m.at(r, f));
        for (auto it = vals.begin(); std::next(it) != vals.end(); ++it) {
            const double thr = 0.5 * (*it + *std::next(it));
            std::vector<int> l, r;
            for (std::size_t i = 0; i < m.rows; ++i) (m.at(i, f) <= thr ? l : r).push_back(m.labels[i]);
            const double child = (l.size() * gini(l) + r.size() * gini(r)) / m.rows;
            if (parent - child > best.gain + 1e-12) best = {static_cast<int>(f), thr, parent - child};
        }
    }
    return best;
}

double accuracy(const ForestModel& f, const FeatureMatrix& m) {
    const auto s = f.predict_scores(m);
    int ok = 0;
    for (std::size_t i = 0; i < m.rows; ++i) ok += (s[i] > 0.5) == (m.labels[i] == 1);
    return static_cast<double>(ok) / m.rows;
}

} // namespace

TEST_CASE("best split agrees with exhaustive search") {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const auto m = random_set(40, 4, seed, 0.8);
        std::vector<std::size_t> rows(m.rows), feats(m.cols);
        std::iota(rows.begin(), rows.end(), 0);
        std::iota(feats.begin(), feats.end(), 0);
        const auto got = best_split(m, rows, feats);
        const auto want = exhaustive_split(m);
        REQUIRE(got);
        REQUIRE(got->gain == Approx(want.gain).margin(1e-12));
        REQUIRE(got->feature == want.feature);
        REQUIRE(got->threshold == want.threshold);
    }
}

TEST_CASE("trained root split matches the exhaustive oracle") {
    const auto m = random_set(60, 3, 77, 1.2);
    ForestParams p;
    p.n_trees = 1;
    p.max_depth = 0;
    p.features_per_split = 3;
    p.bootstrap = false;
    const auto f = train_random_forest(m, p, 1);
    const auto want = exhaustive_split(m);
    CHECK(f.trees[0].nodes[0].feature == want.feature);
    CHECK(f.trees[0].nodes[0].threshold == want.threshold);
}

TEST_CASE("a single unlimited tree reproduces a plain decision tree") {
    const auto m = random_set(200, 4, 3);
    ForestParams p;
    p.n_trees = 1;
    p.max_depth = 0;
    p.features_per_split = 4;
    p.bootstrap = false;
    const auto f = train_random_forest(m, p, 1);
    CHECK(accuracy(f, m) == 1.0);
    for (double s : f.predict_scores(m)) CHECK((s == 0.0 || s == 1.0));
}

TEST_CASE("one threshold suffices on pure single-feature data") {
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 100; ++i) {
        rows.push_back({static_cast<double>(i), static_cast<double>((i * 37) % 11)});
        labels.push_back(i >= 50);
    }
    const auto train = matrix(rows, labels);
    for (auto& r : rows) r[0] += 0.25;
    const auto test = matrix(rows, labels);
    ForestParams p;
    p.n_trees = 25;
    const auto f = train_random_forest(train, p, 5);
    CHECK(accuracy(f, test) == 1.0);
}

TEST_CASE("forest handles XOR") {
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(-1, 1);
    auto make = [&](int n) {
        std::vector<std::vector<double>> rows;
        std::vector<int> labels;
        for (int i = 0; i < n; ++i) {
            const double x = u(gen), y = u(gen);
            rows.push_back({x, y});
            labels.push_back((x > 0) != (y > 0));
        }
        return matrix(rows, labels);
    };
    const auto train = make(400), test = make(400);
    const auto f = train_random_forest(train, {}, 2);
    CHECK(roc_auc(f.predict_scores(test), test.labels).auc > 0.9);
}

TEST_CASE("unanimous attack votes score 1") {
    ForestModel f;
    f.n_features = 2;
    DecisionTree leaf;
    leaf.nodes.push_back({-1, 0, -1, -1, 1});
    f.trees.assign(5, leaf);
    f.n_trees = 5;
    CHECK(f.score(std::vector<double>{0.3, -2}) == 1.0);
    CHECK_THROWS_AS(f.score(std::vector<double>{1}), std::invalid_argument);
}

TEST_CASE("tree order does not change predictions") {
    const auto m = random_set(200, 6, 8);
    auto f = train_random_forest(m, {}, 3);
    const auto before = f.predict_scores(m);
    std::reverse(f.trees.begin(), f.trees.end());
    CHECK(f.predict_scores(m) == before);
    std::shuffle(f.trees.begin(), f.trees.end(), std::mt19937_64(1));
    CHECK(f.predict_scores(m) == before);
}

TEST_CASE("each tree depends only on its own derived seed") {
    const auto m = random_set(150, 9, 12);
    ForestParams small, big;
    small.n_trees = 7;
    big.n_trees = 23;
    const auto a = train_random_forest(m, small, 99).to_json();
    const auto b = train_random_forest(m, big, 99).to_json();
    for (std::size_t t = 0; t < 7; ++t) CHECK(a["trees"][t] == b["trees"][t]);
    CHECK(train_random_forest(m, small, 99).to_json() == a);
}

TEST_CASE("defaults and limits") {
    const auto m = random_set(300, 20, 4);
    const auto f = train_random_forest(m, {}, 1);
    CHECK(f.trees.size() == 100);
    CHECK(f.features_per_split == 5); // ceil(sqrt(20))
    for (const auto& t : f.trees) {
        // Depth <= 12: walk every node and track its depth.
        std::vector<int> depth(t.nodes.size(), 0);
        for (std::size_t i = 0; i < t.nodes.size(); ++i) {
            const auto& n = t.nodes[i];
            if (n.feature >= 0) {
                depth[static_cast<std::size_t>(n.left)] = depth[i] + 1;
                depth[static_cast<std::size_t>(n.right)] = depth[i] + 1;
            }
            REQUIRE(depth[i] <= 12);
            REQUIRE((n.vote == 0 || n.vote == 1));
        }
    }
}

TEST_CASE("forest json round-trip") {
    const auto m = random_set(100, 5, 2);
    ForestParams p;
    p.n_trees = 10;
    const auto f = train_random_forest(m, p, 4);
    const auto back = ForestModel::from_json(nlohmann::json::parse(f.to_json().dump()));
    CHECK(back.predict_scores(m) == f.predict_scores(m));
    CHECK(back.to_json() == f.to_json());
}

TEST_CASE("forest rejects bad input") {
    auto m = random_set(20, 2, 1);
    ForestParams p;
    p.n_trees = 0;
    CHECK_THROWS_AS(train_random_forest(m, p, 1), std::invalid_argument);
    std::fill(m.labels.begin(), m.labels.end(), 0);
    CHECK_THROWS_AS(train_random_forest(m, {}, 1), std::invalid_argument);
}

TEST_CASE("forest on shuffled labels is at chance") {
    double sum = 0;
    for (int s = 0; s < 10; ++s) {
        auto train = random_set(300, 5, 500 + s, 1.5);
        const auto test = random_set(300, 5, 600 + s, 1.5);
        std::shuffle(train.labels.begin(), train.labels.end(), std::mt19937_64(700 + s));
        ForestParams p;
        p.n_trees = 30;
        sum += roc_auc(train_random_forest(train, p, s).predict_scores(test), test.labels).auc;
    }
    CHECK(sum / 10 >= 0.4);
    CHECK(sum / 10 <= 0.6);
}
