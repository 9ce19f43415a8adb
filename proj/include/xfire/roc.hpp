#pragma once

#include <span>
#include <vector>

namespace xfire {

struct RocPoint {
    double threshold = 0.0; // rows with score >= threshold are called attack
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocReport {
    std::vector<RocPoint> points; // (0,0) first, (1,1) last
    double auc = 0.0;             // rank statistic, ties count one half
    double auc_trapezoid = 0.0;   // area under `points`
};

/// Throws std::invalid_argument unless both classes are present.
RocReport roc_auc(std::span<const double> scores, std::span<const int> labels);

} // namespace xfire
