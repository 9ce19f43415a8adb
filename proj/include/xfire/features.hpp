#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "xfire/engine.hpp"

namespace xfire {

/// Row-major link-volume features with binary labels (1 = attack).
struct FeatureMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;
    std::vector<int> labels;
    std::vector<LinkId> column_manifest;
    std::vector<double> times;

    std::span<const double> row(std::size_t r) const { return {values.data() + r * cols, cols}; }
    double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
    bool has_both_classes() const;

    /// Keep only the listed columns, in the given order.
    FeatureMatrix select_columns(const std::vector<std::size_t>& columns) const;
    /// Stack rows of matrices with identical manifests.
    static FeatureMatrix concat(const std::vector<FeatureMatrix>& parts);
};

enum class WarmupLabel {
    attack,  // warm-up polls count as attack rows
    exclude, // warm-up polls are dropped
};

/// One row per poll; each column holds the bits carried by a selected link
/// over that poll interval.
FeatureMatrix extract_features(const LinkSampleSeries& series, const std::vector<LinkId>& link_selection,
                               WarmupLabel warmup = WarmupLabel::attack);

/// Column standardization fitted on training rows only.
class Standardizer {
public:
    static Standardizer fit(const FeatureMatrix& train);
    FeatureMatrix apply(const FeatureMatrix& m) const;
    const std::vector<double>& mean() const { return mean_; }
    const std::vector<double>& stddev() const { return std_; }

private:
    std::vector<double> mean_;
    std::vector<double> std_;
};

} // namespace xfire
