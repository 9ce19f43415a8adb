#include <catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "xfire/detect_corr.hpp"

using namespace xfire;
using Catch::Approx;

namespace {

// Textbook formula: n*sum(xy) - sum(x)sum(y) over the root of the product
// of the two variance terms, accumulated in long double.
double textbook_r(const std::vector<double>& x, const std::vector<double>& y) {
    long double n = x.size(), sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += (long double)x[i] * x[i];
        syy += (long double)y[i] * y[i];
        sxy += (long double)x[i] * y[i];
    }
    return static_cast<double>((n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy)));
}

std::vector<double> times_for(std::size_t n) {
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = 5.0 * (i + 1);
    return t;
}

} // namespace

TEST_CASE("pearson_r matches the textbook formula on 1000 random pairs") {
    std::mt19937_64 gen(2024);
    std::normal_distribution<double> noise(0, 1);
    std::uniform_int_distribution<int> len(2, 60);
    for (int k = 0; k < 1000; ++k) {
        const int n = len(gen);
        const double mix = (k % 7) / 6.0;
        std::vector<double> x(n), y(n);
        for (int i = 0; i < n; ++i) {
            x[i] = 1e5 + 3e4 * noise(gen);
            y[i] = mix * x[i] + (1 - mix) * (2e5 + 1e4 * noise(gen));
        }
        const auto r = pearson_r(x, y);
        REQUIRE(r);
        REQUIRE(std::abs(*r - textbook_r(x, y)) < 1e-9);
    }
}

TEST_CASE("pearson_r spot values") {
    const std::vector<double> x{1, 2, 3, 4, 5};
    CHECK(pearson_r(x, std::vector<double>{2, 4, 6, 8, 10}).value() == Approx(1.0));
    CHECK(pearson_r(x, std::vector<double>{5, 4, 3, 2, 1}).value() == Approx(-1.0));
    // Hand value: centered x = (-2..2), y = (1,3,2,5,4) -> 8 / sqrt(10 * 10).
    CHECK(pearson_r(x, std::vector<double>{1, 3, 2, 5, 4}).value() == Approx(0.8));
}

TEST_CASE("pearson_r invariances") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(0, 1);
    for (int k = 0; k < 200; ++k) {
        std::vector<double> x(30), y(30);
        for (int i = 0; i < 30; ++i) {
            x[i] = u(gen);
            y[i] = 0.5 * x[i] + u(gen);
        }
        const double r = pearson_r(x, y).value();
        CHECK(pearson_r(y, x).value() == Approx(r).margin(1e-12));
        const double a = 0.1 + 10 * u(gen), b = 100 * u(gen) - 50;
        std::vector<double> ax(30), nx(30);
        for (int i = 0; i < 30; ++i) {
            ax[i] = a * x[i] + b;
            nx[i] = -a * x[i] + b;
        }
        CHECK(pearson_r(ax, y).value() == Approx(r).margin(1e-12));
        CHECK(pearson_r(nx, y).value() == Approx(-r).margin(1e-12));
        CHECK(std::abs(r) <= 1.0);
    }
}

TEST_CASE("pearson_r edge cases") {
    const std::vector<double> c{3, 3, 3};
    const std::vector<double> x{1, 2, 3};
    CHECK_FALSE(pearson_r(c, x));
    CHECK_FALSE(pearson_r(x, c));
    CHECK_THROWS_AS(pearson_r(x, std::vector<double>{1, 2}), std::invalid_argument);
    CHECK_THROWS_AS(pearson_r(std::vector<double>{1}, std::vector<double>{2}), std::invalid_argument);
}

TEST_CASE("sliding mean correlation") {
    SECTION("identical ramps correlate fully") {
        std::vector<std::vector<double>> s(4, std::vector<double>(50));
        for (auto& v : s)
            for (int i = 0; i < 50; ++i) v[i] = 100 + 3 * i;
        const auto trace = sliding_mean_corr(s, times_for(50), 30);
        CHECK(trace.mean_r.size() == 21);
        CHECK(trace.pair_count == 6);
        CHECK(trace.times.front() == 150);
        CHECK(trace.times.back() == 250);
        for (double r : trace.mean_r) CHECK(r == Approx(1.0));
    }
    SECTION("80 series give 3160 pairs; white noise stays near zero") {
        std::mt19937_64 gen(99);
        std::normal_distribution<double> noise(0, 1);
        std::vector<std::vector<double>> s(80, std::vector<double>(120));
        for (auto& v : s)
            for (auto& x : v) x = noise(gen);
        const auto trace = sliding_mean_corr(s, times_for(120), 30);
        CHECK(trace.pair_count == 3160);
        for (double r : trace.mean_r) CHECK(std::abs(r) < 0.05);
    }
    SECTION("window entries match pairwise pearson_r") {
        std::mt19937_64 gen(5);
        std::uniform_real_distribution<double> u(0, 1);
        std::vector<std::vector<double>> s(5, std::vector<double>(40));
        for (auto& v : s)
            for (auto& x : v) x = u(gen);
        const auto trace = sliding_mean_corr(s, times_for(40), 10, true);
        for (std::size_t w = 0; w < trace.mean_r.size(); ++w) {
            double sum = 0;
            std::size_t k = 0;
            for (std::size_t i = 0; i < 5; ++i)
                for (std::size_t j = i + 1; j < 5; ++j, ++k) {
                    const std::vector<double> a(s[i].begin() + w, s[i].begin() + w + 10);
                    const std::vector<double> b(s[j].begin() + w, s[j].begin() + w + 10);
                    const double r = textbook_r(a, b);
                    CHECK(trace.pair_r[w][k] == Approx(r).margin(1e-9));
                    sum += r;
                }
            CHECK(trace.mean_r[w] == Approx(sum / 10).margin(1e-9));
        }
    }
    SECTION("zero-variance windows are left out of the mean") {
        std::vector<std::vector<double>> s{{1, 2, 3, 4}, {2, 4, 6, 8}, {5, 5, 5, 5}};
        const auto trace = sliding_mean_corr(s, times_for(4), 3);
        for (std::size_t w = 0; w < trace.mean_r.size(); ++w) {
            CHECK(trace.n_valid[w] == 1);
            CHECK(trace.mean_r[w] == Approx(1.0));
        }
        std::vector<std::vector<double>> flat{{1, 1, 1}, {2, 2, 2}};
        CHECK(std::isnan(sliding_mean_corr(flat, times_for(3), 3).mean_r[0]));
    }
    SECTION("errors") {
        std::vector<std::vector<double>> s{{1, 2, 3}, {1, 2, 3}};
        CHECK_THROWS_AS(sliding_mean_corr(s, times_for(3), 5), std::invalid_argument);
        CHECK_THROWS_AS(sliding_mean_corr(s, times_for(2), 2), std::invalid_argument);
        CHECK_THROWS_AS(sliding_mean_corr({{1, 2, 3}}, times_for(3), 2), std::invalid_argument);
        CHECK_THROWS_AS(sliding_mean_corr({{1, 2, 3}, {1, 2}}, times_for(3), 2), std::invalid_argument);
    }
}

TEST_CASE("trace csv") {
    std::vector<std::vector<double>> s{{1, 2, 3, 5}, {2, 4, 6, 7}};
    const auto trace = sliding_mean_corr(s, times_for(4), 3, true);
    std::ostringstream a, b;
    trace.write_csv(a);
    trace.write_pairs_csv(b);
    CHECK(a.str().rfind("t,mean_r,n_valid_pairs\n", 0) == 0);
    CHECK(b.str().rfind("t,0-1\n", 0) == 0);
}

TEST_CASE("l1 normalization") {
    const auto v = l1_normalize(std::vector<double>{2, 2, 4});
    CHECK(v == std::vector<double>{0.25, 0.25, 0.5});
    CHECK(l1_normalize(v) == v);
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0, 1e6);
    for (int k = 0; k < 100; ++k) {
        std::vector<double> x(50);
        for (auto& e : x) e = u(gen);
        const auto n = l1_normalize(x);
        CHECK(std::accumulate(n.begin(), n.end(), 0.0) == Approx(1.0).margin(1e-12));
    }
    CHECK_THROWS_AS(l1_normalize(std::vector<double>{0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(l1_normalize(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("alarm policy") {
    CorrelationTrace t;
    t.times = {5, 10, 15, 20, 25, 30};
    t.mean_r = {0.1, 0.6, 0.7, 0.2, 0.6, 0.8};
    CHECK_FALSE(alarm(t, {0.5, 3}));
    CHECK(alarm(t, {0.5, 2}).value() == 15);
    CHECK(alarm(t, {0.5, 1}).value() == 10);
    t.mean_r.push_back(0.9);
    t.times.push_back(35);
    CHECK(alarm(t, {0.5, 3}).value() == 35);
    // A threshold of 1 never fires on a noisy trace.
    CHECK_FALSE(alarm(t, {1.0, 1}));

    CHECK_THROWS(AlarmPolicy{1.0, 3}.validate());
    CHECK_THROWS(AlarmPolicy{0.5, 0}.validate());
    CHECK_NOTHROW(AlarmPolicy{0.5, 3}.validate());
}
