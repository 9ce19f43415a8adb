#include "xfire/roc.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace xfire {

RocReport roc_auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw std::invalid_argument("scores and labels differ in length");
    const std::size_t n = scores.size();
    double n_pos = 0.0;
    for (int y : labels) n_pos += y != 0 ? 1.0 : 0.0;
    const double n_neg = static_cast<double>(n) - n_pos;
    if (n_pos == 0.0 || n_neg == 0.0) throw std::invalid_argument("ROC needs both classes");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    RocReport rep;

    // Mann-Whitney U with average ranks for ties (ranks doubled to stay integral).
    double rank_sum2 = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double doubled_rank = static_cast<double>(i + 1 + j); // 2 * mean of ranks i+1..j
        for (std::size_t k = i; k < j; ++k)
            if (labels[order[k]] != 0) rank_sum2 += doubled_rank;
        i = j;
    }
    rep.auc = (rank_sum2 / 2.0 - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);

    // Threshold sweep from the highest score down; tied scores move together.
    rep.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
    double tp = 0.0, fp = 0.0, area2 = 0.0;
    for (std::size_t i = n; i > 0;) {
        std::size_t j = i;
        const double s = scores[order[i - 1]];
        double dtp = 0.0, dfp = 0.0;
        while (j > 0 && scores[order[j - 1]] == s) {
            (labels[order[j - 1]] != 0 ? dtp : dfp) += 1.0;
            --j;
        }
        area2 += dfp * (2.0 * tp + dtp);
        tp += dtp;
        fp += dfp;
        rep.points.push_back({s, fp / n_neg, tp / n_pos});
        i = j;
    }
    rep.auc_trapezoid = area2 / 2.0 / (n_pos * n_neg);
    return rep;
}

} // namespace xfire
