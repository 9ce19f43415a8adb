#include "xfire/features.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace xfire {

bool FeatureMatrix::has_both_classes() const {
    bool pos = false, neg = false;
    for (int y : labels) (y ? pos : neg) = true;
    return pos && neg;
}

FeatureMatrix FeatureMatrix::select_columns(const std::vector<std::size_t>& columns) const {
    FeatureMatrix out;
    out.rows = rows;
    out.cols = columns.size();
    out.labels = labels;
    out.times = times;
    out.values.resize(rows * columns.size());
    for (auto c : columns) {
        if (c >= cols) throw std::out_of_range(fmt::format("column {} out of range", c));
        out.column_manifest.push_back(column_manifest[c]);
    }
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t j = 0; j < columns.size(); ++j) out.values[r * out.cols + j] = at(r, columns[j]);
    return out;
}

FeatureMatrix FeatureMatrix::concat(const std::vector<FeatureMatrix>& parts) {
    if (parts.empty()) throw std::invalid_argument("nothing to concatenate");
    FeatureMatrix out;
    out.cols = parts.front().cols;
    out.column_manifest = parts.front().column_manifest;
    for (const auto& p : parts) {
        if (p.column_manifest != out.column_manifest) throw std::invalid_argument("feature manifests differ");
        out.rows += p.rows;
        out.values.insert(out.values.end(), p.values.begin(), p.values.end());
        out.labels.insert(out.labels.end(), p.labels.begin(), p.labels.end());
        out.times.insert(out.times.end(), p.times.begin(), p.times.end());
    }
    return out;
}

FeatureMatrix extract_features(const LinkSampleSeries& series, const std::vector<LinkId>& link_selection,
                               WarmupLabel warmup) {
    if (link_selection.empty()) throw std::invalid_argument("empty link selection");
    for (auto l : link_selection)
        if (l.value < 0 || static_cast<std::size_t>(l.value) >= series.link_count())
            throw std::out_of_range(fmt::format("link {} is not in the series", l.value));

    FeatureMatrix m;
    m.cols = link_selection.size();
    m.column_manifest = link_selection;
    const auto labels = series.labels();
    for (std::size_t p = 0; p < series.poll_count(); ++p) {
        if (warmup == WarmupLabel::exclude && labels[p] == SampleLabel::warmup) continue;
        for (auto l : link_selection) m.values.push_back(series.at(p, l).carried_bits);
        m.labels.push_back(labels[p] == SampleLabel::normal ? 0 : 1);
        m.times.push_back(series.times()[p]);
        ++m.rows;
    }
    return m;
}

Standardizer Standardizer::fit(const FeatureMatrix& train) {
    if (train.rows == 0) throw std::invalid_argument("cannot fit a standardizer on zero rows");
    Standardizer s;
    s.mean_.assign(train.cols, 0.0);
    s.std_.assign(train.cols, 0.0);
    for (std::size_t r = 0; r < train.rows; ++r)
        for (std::size_t c = 0; c < train.cols; ++c) s.mean_[c] += train.at(r, c);
    for (auto& v : s.mean_) v /= static_cast<double>(train.rows);
    for (std::size_t r = 0; r < train.rows; ++r)
        for (std::size_t c = 0; c < train.cols; ++c) {
            const double d = train.at(r, c) - s.mean_[c];
            s.std_[c] += d * d;
        }
    for (auto& v : s.std_) {
        v = std::sqrt(v / static_cast<double>(train.rows));
        if (!(v > 0.0)) v = 1.0; // constant column stays centered at zero
    }
    return s;
}

FeatureMatrix Standardizer::apply(const FeatureMatrix& m) const {
    if (m.cols != mean_.size()) throw std::invalid_argument("standardizer column count mismatch");
    FeatureMatrix out = m;
    for (std::size_t r = 0; r < m.rows; ++r)
        for (std::size_t c = 0; c < m.cols; ++c)
            out.values[r * m.cols + c] = (m.at(r, c) - mean_[c]) / std_[c];
    return out;
}

} // namespace xfire
