#include "xfire/detect_corr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace xfire {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool constant(std::span<const double> x) {
    auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    return *lo == *hi;
}

// Centered and unit-normalized copy; empty when the input is constant.
std::vector<double> unit_centered(std::span<const double> x) {
    if (constant(x)) return {};
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    std::vector<double> z(x.size());
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        z[i] = x[i] - mean;
        ss += z[i] * z[i];
    }
    if (!(ss > 0.0)) return {};
    const double inv = 1.0 / std::sqrt(ss);
    for (auto& v : z) v *= inv;
    return z;
}

double clamp_r(double r) { return std::clamp(r, -1.0, 1.0); }

} // namespace

std::optional<double> pearson_r(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("pearson_r: series lengths differ");
    if (x.size() < 2) throw std::invalid_argument("pearson_r: need at least two samples");
    const auto zx = unit_centered(x);
    const auto zy = unit_centered(y);
    if (zx.empty() || zy.empty()) return std::nullopt;
    return clamp_r(std::inner_product(zx.begin(), zx.end(), zy.begin(), 0.0));
}

CorrelationTrace sliding_mean_corr(const std::vector<std::vector<double>>& series, std::span<const double> times,
                                   std::size_t window, bool keep_pairs) {
    if (window < 2) throw std::invalid_argument("correlation window must be at least 2");
    if (series.size() < 2) throw std::invalid_argument("need at least two series to correlate");
    const std::size_t n = series.front().size();
    for (const auto& s : series)
        if (s.size() != n) throw std::invalid_argument("series are not aligned");
    if (times.size() != n) throw std::invalid_argument("times do not match series length");
    if (n < window) throw std::invalid_argument(fmt::format("series length {} is shorter than window {}", n, window));

    CorrelationTrace trace;
    trace.window = window;
    trace.n_links = series.size();
    trace.pair_count = series.size() * (series.size() - 1) / 2;

    std::vector<std::vector<double>> z(series.size());
    for (std::size_t end = window; end <= n; ++end) {
        for (std::size_t i = 0; i < series.size(); ++i)
            z[i] = unit_centered(std::span<const double>(series[i]).subspan(end - window, window));
        double sum = 0.0;
        std::size_t valid = 0;
        std::vector<double> pairs;
        if (keep_pairs) pairs.reserve(trace.pair_count);
        for (std::size_t i = 0; i < series.size(); ++i) {
            for (std::size_t j = i + 1; j < series.size(); ++j) {
                if (z[i].empty() || z[j].empty()) {
                    if (keep_pairs) pairs.push_back(kNaN);
                    continue;
                }
                const double r = clamp_r(std::inner_product(z[i].begin(), z[i].end(), z[j].begin(), 0.0));
                sum += r;
                ++valid;
                if (keep_pairs) pairs.push_back(r);
            }
        }
        trace.times.push_back(times[end - 1]);
        trace.mean_r.push_back(valid > 0 ? sum / static_cast<double>(valid) : kNaN);
        trace.n_valid.push_back(valid);
        if (keep_pairs) trace.pair_r.push_back(std::move(pairs));
    }
    return trace;
}

void CorrelationTrace::write_csv(std::ostream& out) const {
    out << "t,mean_r,n_valid_pairs\n";
    for (std::size_t w = 0; w < times.size(); ++w)
        out << fmt::format("{:.0f},{:.6f},{}\n", times[w], mean_r[w], n_valid[w]);
}

void CorrelationTrace::write_pairs_csv(std::ostream& out) const {
    out << "t";
    for (std::size_t i = 0; i < n_links; ++i)
        for (std::size_t j = i + 1; j < n_links; ++j) out << fmt::format(",{}-{}", i, j);
    out << '\n';
    for (std::size_t w = 0; w < pair_r.size(); ++w) {
        out << fmt::format("{:.0f}", times[w]);
        for (double r : pair_r[w]) out << fmt::format(",{:.6f}", r);
        out << '\n';
    }
}

std::vector<double> l1_normalize(std::span<const double> series) {
    if (series.empty()) throw std::invalid_argument("l1_normalize: empty series");
    double norm = 0.0;
    for (double v : series) norm += std::abs(v);
    if (!(norm > 0.0)) throw std::invalid_argument("l1_normalize: all-zero series");
    std::vector<double> out(series.begin(), series.end());
    for (auto& v : out) v /= norm;
    return out;
}

void AlarmPolicy::validate() const {
    if (!(threshold > -1.0 && threshold < 1.0)) throw std::invalid_argument("alarm threshold must be in (-1, 1)");
    if (consecutive < 1) throw std::invalid_argument("alarm needs at least one consecutive window");
}

std::optional<double> alarm(const CorrelationTrace& trace, const AlarmPolicy& policy) {
    if (policy.consecutive < 1) throw std::invalid_argument("alarm needs at least one consecutive window");
    int run = 0;
    for (std::size_t w = 0; w < trace.mean_r.size(); ++w) {
        const double r = trace.mean_r[w];
        run = (!std::isnan(r) && r >= policy.threshold) ? run + 1 : 0;
        if (run >= policy.consecutive) return trace.times[w];
    }
    return std::nullopt;
}

} // namespace xfire
