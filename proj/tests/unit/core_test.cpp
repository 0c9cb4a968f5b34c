#include <cmath>
#include <numbers>
#include <numeric>

#include "doctest.h"
#include "retail/core/error.hpp"
#include "retail/core/series_ops.hpp"
#include "support/simulate.hpp"

using namespace retail;

namespace {

TimeSeries make(std::vector<double> v, int start = 1) {
    return {"s", start, std::move(v)};
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST_CASE("time series invariants") {
    CHECK_THROWS_AS(make({}), InvalidArgument);
    CHECK_THROWS_AS(make({1.0}, 0), InvalidArgument);
    auto s = make({1, 2, 3, 4}, 5);
    CHECK(s.end_day() == 8);
    CHECK(s.tail(2).start_day() == 7);
    CHECK(s.head(3).values().back() == 3.0);
}

TEST_CASE("difference") {
    CHECK(difference(make({5, 5, 5}), 1).values()[0] == 0.0);
    auto d1 = difference(make({1, 3, 6, 10}), 1);
    CHECK(std::vector<double>(d1.values().begin(), d1.values().end()) == std::vector<double>{2, 3, 4});
    CHECK(d1.start_day() == 2);
    auto d2 = difference(make({1, 3, 6, 10}), 2);
    CHECK(std::vector<double>(d2.values().begin(), d2.values().end()) == std::vector<double>{1, 1});
    CHECK(difference(make({1, 2}), 0).size() == 2);
    CHECK_THROWS_AS(difference(make({1, 3, 6}), 3), InvalidArgument);
    CHECK_THROWS_AS(difference(make({1, 3, 6}), -1), InvalidArgument);
}

TEST_CASE("difference then integrate recovers the series") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto values = testing::uniform(50, -10.0, 10.0, seed);
        // Integer-valued data keeps every partial sum exact.
        for (double& v : values) {
            v = std::round(v);
        }
        auto series = make(values);
        for (int d = 1; d <= 3; ++d) {
            auto diffed = difference(series, d);
            std::vector<double> level(diffed.values().begin(), diffed.values().end());
            for (int k = d; k >= 1; --k) {
                auto prefix = difference(series, k - 1);
                level = integrate(level, prefix[0]);
                level.insert(level.begin(), prefix[0]);
            }
            CHECK(level == values);
        }
    }
}

TEST_CASE("acf") {
    auto s = make({1, 4, 2, 8, 5, 7});
    auto r = acf(s, 3);
    CHECK(r[0] == 1.0);
    for (double v : r) {
        CHECK(std::abs(v) <= 1.0);
    }
    CHECK_THROWS_AS(acf(make({2, 2, 2, 2}), 1), DegenerateInput);
    CHECK_THROWS_AS(acf(s, 6), InvalidArgument);

    // Theoretical lag-1 autocorrelation of AR(1) is phi.
    auto ar = make(testing::simulate_ar1(10000, 0.8, 0.0, 42));
    auto ar_acf = acf(ar, 5);
    CHECK(ar_acf[1] >= 0.77);
    CHECK(ar_acf[1] <= 0.83);
}

TEST_CASE("acf stays bounded on random series") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto r = acf(make(testing::uniform(40, -1.0, 1.0, seed)), 39);
        CHECK(r[0] == 1.0);
        for (double v : r) {
            CHECK(std::abs(v) <= 1.0 + 1e-15);
        }
    }
}

TEST_CASE("decompose: pure trend has no seasonality") {
    std::vector<double> y(30);
    std::iota(y.begin(), y.end(), 1.0);
    auto dec = decompose(make(y), 7, DecompositionMode::additive);
    for (double s : dec.seasonal) {
        CHECK(std::abs(s) < 1e-6);
    }
}

TEST_CASE("decompose: recovers a weekly sinusoid") {
    std::vector<double> y(70), sine(70);
    for (int t = 1; t <= 70; ++t) {
        sine[t - 1] = std::sin(2 * std::numbers::pi * t / 7.0);
        y[t - 1] = 10 + sine[t - 1];
    }
    auto dec = decompose(make(y), 7, DecompositionMode::additive);
    CHECK(correlation(dec.seasonal, sine) > 0.99);
}

TEST_CASE("decompose: even period uses the 2x moving average") {
    std::vector<double> y(24);
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = 3.0 + 0.5 * static_cast<double>(i) + (i % 4 == 0 ? 2.0 : -2.0 / 3.0);
    }
    auto dec = decompose(make(y), 4, DecompositionMode::additive);
    // A linear trend passes through the centered 2x4 average unchanged.
    for (std::size_t i = 2; i + 2 < y.size(); ++i) {
        CHECK(dec.level_trend[i] == doctest::Approx(3.0 + 0.5 * static_cast<double>(i)));
    }
    CHECK(dec.seasonal[0] == doctest::Approx(2.0));
    CHECK(dec.seasonal[1] == doctest::Approx(-2.0 / 3.0));
}

TEST_CASE("decompose: multiplicative equals additive in the log domain") {
    std::vector<double> y(140), logs(140);
    for (int t = 1; t <= 140; ++t) {
        logs[t - 1] = t / 100.0 + 0.1 * std::sin(2 * std::numbers::pi * t / 7.0);
        y[t - 1] = std::exp(logs[t - 1]);
    }
    auto mult = decompose(make(y), 7, DecompositionMode::multiplicative);
    auto add = decompose(make(logs), 7, DecompositionMode::additive);
    for (std::size_t i = 0; i < y.size(); ++i) {
        CHECK(std::abs(std::log(mult.level_trend[i]) - add.level_trend[i]) < 1e-6);
        CHECK(std::abs(std::log(mult.seasonal[i]) - add.seasonal[i]) < 1e-6);
        CHECK(std::abs(std::log(mult.residual[i]) - add.residual[i]) < 1e-6);
    }
}

TEST_CASE("decompose: errors") {
    CHECK_THROWS_AS(decompose(make({1, 2, 3}), 2, DecompositionMode::additive), InvalidArgument);
    CHECK_THROWS_AS(decompose(make({1, 2, 0, 4, 5}), 2, DecompositionMode::multiplicative), DomainError);
    CHECK_THROWS_AS(decompose(make({1, 2, 3}), 0, DecompositionMode::additive), InvalidArgument);
}

TEST_CASE("decompose: reconstruction holds for random series in both modes") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const int period = 2 + static_cast<int>(seed % 11);
        const std::size_t n = 2 * static_cast<std::size_t>(period) + seed % 40;
        auto y = testing::uniform(n, 0.5, 50.0, seed);
        auto add = decompose(make(y), period, DecompositionMode::additive);
        auto mult = decompose(make(y), period, DecompositionMode::multiplicative);
        REQUIRE(add.seasonal.size() == n);
        REQUIRE(mult.residual.size() == n);
        for (std::size_t i = 0; i < n; ++i) {
            const double tol = 1e-9 * std::abs(y[i]);
            CHECK(std::abs(add.level_trend[i] + add.seasonal[i] + add.residual[i] - y[i]) <= tol);
            CHECK(std::abs(mult.level_trend[i] * mult.seasonal[i] * mult.residual[i] - y[i]) <= tol);
        }
    }
}

TEST_CASE("rmse") {
    const std::vector<double> a = {1.5, -2.0, 7.0};
    CHECK(rmse(a, a) == 0.0);
    CHECK(rmse(std::vector<double>{0, 0}, std::vector<double>{3, 4}) == doctest::Approx(std::sqrt(12.5)).epsilon(1e-15));
    CHECK(rmse(std::vector<double>{0, 0}, std::vector<double>{3, 4}) == doctest::Approx(3.535534).epsilon(1e-6));
    CHECK_THROWS_AS(rmse(std::vector<double>{}, std::vector<double>{}), InvalidArgument);
    CHECK_THROWS_AS(rmse(a, std::vector<double>{1.0}), InvalidArgument);

    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto x = testing::uniform(17, -3, 3, seed);
        auto y = testing::uniform(17, -3, 3, seed + 100);
        CHECK(rmse(x, y) == rmse(y, x));
        CHECK(rmse(x, y) > 0.0);
    }
}
