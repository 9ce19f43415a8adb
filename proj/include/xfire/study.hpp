#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xfire/config.hpp"

namespace xfire {

enum class StudyKind { distribution, feature_count, visibility };
const char* to_string(StudyKind kind);
std::optional<StudyKind> study_kind_from_string(const std::string& name);

struct StudyRow {
    std::string config; // e.g. "4ST/svm", "k=20/rf", "20edge+up/svm"
    std::uint64_t seed = 0;
    double auc = 0.0;
};

struct StudyReport {
    StudyKind kind = StudyKind::distribution;
    std::vector<StudyRow> rows; // config-major, seeds in the order given

    std::vector<std::string> configs() const;
    std::vector<double> aucs(const std::string& config) const;
    double mean(const std::string& config) const;
    double stddev(const std::string& config) const;

    /// `config,seed,auc`, then per config a `mean` and a `std` row.
    void write_csv(std::ostream& out) const;
};

/// Train on `train_runs` seeded runs and test on `test_runs` disjoint ones,
/// per seed, for SVM and forest. Standardization is fitted on the training
/// rows only.
///   distribution:  all decoy edges of each topology in detect.ml.topologies
///   feature_count: random decoy-edge subsets of detect.ml.feature_sizes on
///                  topology.n_subtrees
///   visibility:    edge_subset edges and all edges, each with and without
///                  one random level-1 link, on topology.n_subtrees
StudyReport run_study(StudyKind kind, const ScenarioConfig& config, const std::vector<std::uint64_t>& seeds);

} // namespace xfire
