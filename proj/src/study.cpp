#include "xfire/study.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "parallel.hpp"
#include "xfire/experiment.hpp"
#include "xfire/features.hpp"
#include "xfire/forest.hpp"
#include "xfire/rng.hpp"
#include "xfire/roc.hpp"
#include "xfire/svm.hpp"

namespace xfire {

const char* to_string(StudyKind kind) {
    switch (kind) {
    case StudyKind::distribution: return "distribution";
    case StudyKind::feature_count: return "feature_count";
    case StudyKind::visibility: return "visibility";
    }
    return "?";
}

std::optional<StudyKind> study_kind_from_string(const std::string& name) {
    for (auto k : {StudyKind::distribution, StudyKind::feature_count, StudyKind::visibility})
        if (name == to_string(k)) return k;
    return std::nullopt;
}

std::vector<std::string> StudyReport::configs() const {
    std::vector<std::string> out;
    for (const auto& r : rows)
        if (std::find(out.begin(), out.end(), r.config) == out.end()) out.push_back(r.config);
    return out;
}

std::vector<double> StudyReport::aucs(const std::string& config) const {
    std::vector<double> out;
    for (const auto& r : rows)
        if (r.config == config) out.push_back(r.auc);
    return out;
}

double StudyReport::mean(const std::string& config) const {
    const auto v = aucs(config);
    if (v.empty()) throw std::out_of_range(fmt::format("no study rows for {}", config));
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double StudyReport::stddev(const std::string& config) const {
    const auto v = aucs(config);
    if (v.size() < 2) return 0.0;
    const double m = mean(config);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

void StudyReport::write_csv(std::ostream& out) const {
    out << "config,seed,auc\n";
    for (const auto& r : rows) out << fmt::format("{},{},{:.6f}\n", r.config, r.seed, r.auc);
    for (const auto& c : configs()) {
        out << fmt::format("{},mean,{:.6f}\n", c, mean(c));
        out << fmt::format("{},std,{:.6f}\n", c, stddev(c));
    }
}

namespace {

struct Dataset {
    std::vector<LinkSampleSeries> train;
    std::vector<LinkSampleSeries> test;
};

Dataset simulate(const ScenarioConfig& base, int n_subtrees, std::uint64_t seed) {
    ScenarioConfig c = base;
    c.topology.n_subtrees = n_subtrees;
    const auto& ml = c.detect.ml;
    Dataset d;
    for (int r = 0; r < ml.train_runs; ++r)
        d.train.push_back(run(build_scenario(c, derive_seed(seed, {static_cast<std::uint64_t>(n_subtrees), 0,
                                                                  static_cast<std::uint64_t>(r)}))
                                  .scenario));
    for (int r = 0; r < ml.test_runs; ++r)
        d.test.push_back(run(build_scenario(c, derive_seed(seed, {static_cast<std::uint64_t>(n_subtrees), 1,
                                                                 static_cast<std::uint64_t>(r)}))
                                 .scenario));
    return d;
}

FeatureMatrix stack(const std::vector<LinkSampleSeries>& runs, const std::vector<LinkId>& columns, WarmupLabel w) {
    std::vector<FeatureMatrix> parts;
    for (const auto& s : runs) parts.push_back(extract_features(s, columns, w));
    return FeatureMatrix::concat(parts);
}

struct Aucs {
    double svm = 0.0;
    double rf = 0.0;
};

Aucs evaluate(const Dataset& data, const std::vector<LinkId>& columns, const MlConfig& ml, std::uint64_t seed) {
    auto train = stack(data.train, columns, ml.warmup);
    auto test = stack(data.test, columns, ml.warmup);
    for (const auto* m : {&train, &test}) {
        const auto pos = std::count(m->labels.begin(), m->labels.end(), 1);
        if (pos == 0 || pos == static_cast<std::ptrdiff_t>(m->labels.size()))
            throw std::runtime_error("study runs produced a single class; the attack never loads the target "
                                     "(check attack volume against background load)");
    }
    const auto scaler = Standardizer::fit(train);
    train = scaler.apply(train);
    test = scaler.apply(test);

    const auto svm = train_linear_svm(train, ml.svm_regularization, ml.svm_epochs, derive_seed(seed, {1}));
    const auto forest = train_random_forest(train, ml.forest, derive_seed(seed, {2}));
    return {roc_auc(svm.predict_scores(test), test.labels).auc, roc_auc(forest.predict_scores(test), test.labels).auc};
}

std::vector<LinkId> random_subset(std::vector<LinkId> pool, std::size_t k, std::uint64_t seed) {
    SplitMix rng(seed);
    k = std::min(k, pool.size());
    for (std::size_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

void add(StudyReport& rep, const std::string& config, std::uint64_t seed, const Aucs& a) {
    rep.rows.push_back({config + "/svm", seed, a.svm});
    rep.rows.push_back({config + "/rf", seed, a.rf});
}

// Rows come out seed-major; reorder config-major so the CSV groups cells.
void group_by_config(StudyReport& rep) {
    const auto order = rep.configs();
    std::stable_sort(rep.rows.begin(), rep.rows.end(), [&](const StudyRow& a, const StudyRow& b) {
        return std::find(order.begin(), order.end(), a.config) < std::find(order.begin(), order.end(), b.config);
    });
}

} // namespace

StudyReport run_study(StudyKind kind, const ScenarioConfig& config, const std::vector<std::uint64_t>& seeds) {
    const auto& ml = config.detect.ml;
    auto per_seed = detail::parallel_map(seeds.size(), [&](std::size_t i) {
        const auto seed = seeds[i];
        StudyReport rep;
        switch (kind) {
        case StudyKind::distribution:
            for (int n : ml.topologies) {
                const auto data = simulate(config, n, seed);
                const auto edges = data.train.front().topology().links_at_level(2);
                add(rep, fmt::format("{}ST", n), seed, evaluate(data, edges, ml, derive_seed(seed, {10, static_cast<std::uint64_t>(n)})));
            }
            break;
        case StudyKind::feature_count: {
            const auto data = simulate(config, config.topology.n_subtrees, seed);
            const auto edges = data.train.front().topology().links_at_level(2);
            for (int k : ml.feature_sizes) {
                const auto cols = random_subset(edges, static_cast<std::size_t>(k), derive_seed(seed, {20, static_cast<std::uint64_t>(k)}));
                add(rep, fmt::format("k={}", k), seed, evaluate(data, cols, ml, derive_seed(seed, {21, static_cast<std::uint64_t>(k)})));
            }
            break;
        }
        case StudyKind::visibility: {
            const auto data = simulate(config, config.topology.n_subtrees, seed);
            const auto& topo = data.train.front().topology();
            const auto edges = topo.links_at_level(2);
            const auto upper = random_subset(topo.links_at_level(1), 1, derive_seed(seed, {30})).front();
            const auto subset = random_subset(edges, static_cast<std::size_t>(ml.edge_subset), derive_seed(seed, {31}));
            for (const auto& cols : {subset, edges}) {
                auto with_up = cols;
                with_up.push_back(upper);
                const auto label = fmt::format("{}edge", cols.size());
                add(rep, label, seed, evaluate(data, cols, ml, derive_seed(seed, {32, cols.size()})));
                add(rep, label + "+up", seed, evaluate(data, with_up, ml, derive_seed(seed, {33, cols.size()})));
            }
            break;
        }
        }
        return rep;
    });
    StudyReport rep;
    rep.kind = kind;
    for (auto& part : per_seed) rep.rows.insert(rep.rows.end(), part.rows.begin(), part.rows.end());
    group_by_config(rep);
    return rep;
}

} // namespace xfire
