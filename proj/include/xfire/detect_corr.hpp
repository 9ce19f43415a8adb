#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace xfire {

/// Sample Pearson correlation. Returns nullopt when either series is
/// constant; throws std::invalid_argument on length mismatch or fewer than
/// two points.
std::optional<double> pearson_r(std::span<const double> x, std::span<const double> y);

struct CorrelationTrace {
    std::size_t window = 0;
    std::size_t n_links = 0;
    std::size_t pair_count = 0;
    std::vector<double> times;       // end instant of each window
    std::vector<double> mean_r;      // NaN when no pair is defined
    std::vector<std::size_t> n_valid; // pairs with a defined r
    // pair_r[w][pair] when requested; NaN marks an undefined pair.
    std::vector<std::vector<double>> pair_r;

    /// `t,mean_r,n_valid_pairs`
    void write_csv(std::ostream& out) const;
    /// `t,<i>-<j>,...` one column per pair.
    void write_pairs_csv(std::ostream& out) const;
};

/// Trailing-window Pearson r for every pair of the aligned series, plus the
/// mean over pairs with defined r. `times` gives the instant of each sample.
CorrelationTrace sliding_mean_corr(const std::vector<std::vector<double>>& series, std::span<const double> times,
                                   std::size_t window = 30, bool keep_pairs = false);

/// Divide by the sum of absolute values. Throws on an empty or all-zero input.
std::vector<double> l1_normalize(std::span<const double> series);

struct AlarmPolicy {
    double threshold = 0.5;
    int consecutive = 3;
    void validate() const;
};

/// End instant of the window that completes the first run of `consecutive`
/// windows with mean_r >= threshold.
std::optional<double> alarm(const CorrelationTrace& trace, const AlarmPolicy& policy);

} // namespace xfire
