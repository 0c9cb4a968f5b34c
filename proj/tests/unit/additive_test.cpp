#include <cmath>
#include <algorithm>
#include <numbers>
#include <random>

#include "doctest.h"
#include "retail/additive/additive.hpp"
#include "retail/core/error.hpp"
#include "support/simulate.hpp"

using namespace retail;
using namespace retail::additive;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

TimeSeries make(std::vector<double> v) {
    return {"sim", 1, std::move(v)};
}

AdditiveConfig bare_config() {
    AdditiveConfig config;
    config.seasonalities.clear();
    return config;
}

// Fit with random parameters on a random window, for properties that hold for any parameters.
AdditiveFit random_fit(std::mt19937_64& rng, TrendType type) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> count(0, 8);
    AdditiveFit fit;
    fit.first_day = 1;
    fit.last_day = 400;
    fit.config.trend_type = type;
    fit.config.capacity = {50.0 + 50.0 * (u(rng) + 1.0)};
    std::vector<double> cps;
    double day = 10.0;
    for (int j = count(rng); j > 0; --j) {
        day += 5.0 + 40.0 * (u(rng) + 1.0);
        cps.push_back(std::round(day));
    }
    fit.config.changepoints = cps;
    if (type == TrendType::linear) {
        // Per-day rates of daily sales trends are small; the continuity check at a finite step
        // measures step * slope, so unbounded slopes would test the slope rather than the jump.
        fit.k = 0.1 * u(rng);
        fit.m = 10.0 * u(rng);
        for (std::size_t j = 0; j < cps.size(); ++j) {
            fit.delta.push_back(0.03 * u(rng));
        }
        fit.gamma = linear_offsets(fit.delta, cps);
    } else {
        // Keep every segment's rate away from zero, where the logistic offset recursion divides.
        fit.k = 0.05 + 0.05 * (u(rng) + 1.0);
        fit.m = 100.0 + 50.0 * u(rng);
        double rate = fit.k;
        for (std::size_t j = 0; j < cps.size(); ++j) {
            const double next = 0.02 + 0.1 * (u(rng) + 1.0);
            fit.delta.push_back(next - rate);
            rate = next;
        }
        fit.gamma = logistic_offsets(fit.k, fit.m, fit.delta, cps);
    }
    fit.config.seasonalities = {{"weekly", 7.0, 3, 10.0}, {"monthly", 30.4375, 2, 10.0}};
    for (const auto& s : fit.config.seasonalities) {
        std::vector<std::pair<double, double>> coeffs;
        for (int n = 0; n < s.order; ++n) {
            coeffs.emplace_back(u(rng), u(rng));
        }
        fit.fourier_coeffs.push_back(coeffs);
    }
    fit.config.holidays = {{"a", {20, 150, 380, 403}, 10.0}, {"b", {150, 200}, 10.0}};
    fit.holiday_coeffs = {u(rng), u(rng)};
    return fit;
}

}  // namespace

TEST_CASE("changepoint indicator") {
    CHECK(changepoint_indicator(5, {3, 7}) == std::vector<std::uint8_t>{1, 0});
    CHECK(changepoint_indicator(1, {3, 7}) == std::vector<std::uint8_t>{0, 0});
    CHECK(changepoint_indicator(7, {3, 7}) == std::vector<std::uint8_t>{1, 1});
    CHECK(changepoint_indicator(5, {}).empty());
}

TEST_CASE("linear trend") {
    CHECK(trend_linear(4.0, 2.0, 3.0, {}, {}) == 11.0);
    CHECK(trend_linear(10.0, 1.0, 0.0, {-0.5}, {10.0}) == doctest::Approx(10.0));
    CHECK(trend_linear(20.0, 1.0, 0.0, {-0.5}, {10.0}) == doctest::Approx(15.0));
    CHECK(trend_linear(10.0 - 1e-9, 1.0, 0.0, {-0.5}, {10.0}) == doctest::Approx(10.0));
    CHECK(trend_linear(2.0, 0.0, 3.0, {0.7, -2.0}, {5.0, 9.0}) == 3.0);
    CHECK(linear_offsets({0.5, -0.25}, {4.0, 8.0}) == std::vector<double>{-2.0, 2.0});
}

TEST_CASE("logistic trend") {
    CHECK(trend_logistic(30.0, 0.2, 30.0, {}, {}, 80.0) == doctest::Approx(40.0));
    CHECK(trend_logistic(31.0, 1e6, 30.0, {}, {}, 80.0) == doctest::Approx(80.0));
    CHECK_THROWS_AS(trend_logistic(1.0, 0.1, 0.0, {}, {}, 0.0), DomainError);
    CHECK_THROWS_AS(trend_logistic(1.0, 0.1, 0.0, {}, {}, -5.0), DomainError);

    // One changepoint: the second segment is the logistic with rate k + delta whose midpoint
    // is chosen to pass through the first segment's value at the changepoint.
    const double k = 0.1;
    const double delta = 0.05;
    const double s = 50.0;
    const double m = 30.0;
    const double cap = 100.0;
    const double k2 = k + delta;
    const double m2 = s - k * (s - m) / k2;
    auto oracle = [&](double t) {
        return t < s ? cap / (1.0 + std::exp(-k * (t - m))) : cap / (1.0 + std::exp(-k2 * (t - m2)));
    };
    for (double t : {0.0, 10.0, 49.0, 49.999, 50.0, 60.0, 120.0}) {
        CHECK(trend_logistic(t, k, m, {delta}, {s}, cap) == doctest::Approx(oracle(t)).epsilon(1e-12));
    }
    CHECK(std::abs(trend_logistic(s, k, m, {delta}, {s}, cap) - trend_logistic(s - 1e-9, k, m, {delta}, {s}, cap)) <
          1e-8);
}

TEST_CASE("trend continuity at changepoints, both trend types") {
    std::mt19937_64 rng(31);
    for (auto type : {TrendType::linear, TrendType::logistic}) {
        for (int rep = 0; rep < 100; ++rep) {
            const auto fit = random_fit(rng, type);
            const auto& cps = fit.changepoints();
            for (double s : cps) {
                const double cap = fit.config.capacity[0];
                auto g = [&](double t) {
                    return type == TrendType::linear ? trend_linear(t, fit.k, fit.m, fit.delta, cps)
                                                     : trend_logistic(t, fit.k, fit.m, fit.delta, cps, cap);
                };
                const double eps = 1e-6;
                CHECK(std::abs(g(s + eps) - g(s - eps)) < 1e-6 * (1.0 + std::abs(g(s))));
                CHECK(std::abs(g(s) - g(s - 1e-9)) < 1e-8 * (1.0 + std::abs(g(s))));
            }
        }
    }
}

TEST_CASE("fourier seasonality") {
    CHECK(fourier_seasonality(3.0, 7.0, {}) == 0.0);
    CHECK(fourier_seasonality(7.0, 7.0, {{1.0, 0.0}}) == doctest::Approx(1.0));
    CHECK(fourier_seasonality(1.75, 7.0, {{0.0, 1.0}}) == doctest::Approx(1.0));

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double periods[] = {7.0, 30.4375, 91.3125, 365.25};
    for (int rep = 0; rep < 100; ++rep) {
        const double p = periods[rep % 4];
        std::vector<std::pair<double, double>> coeffs(1 + rep % 10);
        for (auto& c : coeffs) {
            c = {u(rng), u(rng)};
        }
        const double t = std::floor(2000.0 * (u(rng) + 1.0));
        CHECK(std::abs(fourier_seasonality(t, p, coeffs) - fourier_seasonality(t + p, p, coeffs)) < 1e-12);
    }
}

TEST_CASE("holiday matrix") {
    const std::vector<Holiday> hs{{"x", {3, 10}, 10.0}, {"y", {10, 12}, 10.0}};
    const auto z = holiday_matrix({3, 10, 11}, hs);
    CHECK(z[0] == std::vector<std::uint8_t>{1, 0});
    CHECK(z[1] == std::vector<std::uint8_t>{1, 1});
    CHECK(z[2] == std::vector<std::uint8_t>{0, 0});
    const auto empty = holiday_matrix({1, 2}, {});
    CHECK(empty.size() == 2);
    CHECK(empty[0].empty());
}

TEST_CASE("fit: noiseless line with changepoints") {
    std::vector<double> y(200);
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = 2.0 * static_cast<double>(i + 1) + 3.0;
    }
    const auto fit = fit_additive(make(y), bare_config());
    CHECK(fit.changepoints().size() == 25);
    CHECK(std::abs(fit.k - 2.0) < 1e-3);
    CHECK(std::abs(fit.m - 3.0) < 1e-3);
    for (double d : fit.delta) {
        CHECK(std::abs(d) < 1e-3);
    }
    for (std::size_t j = 0; j < fit.delta.size(); ++j) {
        CHECK(fit.gamma[j] == -fit.changepoints()[j] * fit.delta[j]);
    }
}

TEST_CASE("fit: slope change is attributed to the nearby changepoints") {
    std::vector<double> y(300);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double t = static_cast<double>(i + 1);
        y[i] = t < 100.0 ? t : 100.0 + 2.0 * (t - 100.0);
    }
    auto config = bare_config();
    config.changepoints = std::vector<double>{20, 40, 60, 80, 100, 120, 140, 160, 180, 200, 220};
    const auto fit = fit_additive(make(y), config);
    double near = 0.0;
    for (std::size_t j = 0; j < fit.delta.size(); ++j) {
        if (std::abs(fit.changepoints()[j] - 100.0) <= 20.0) {
            near += fit.delta[j];
        }
    }
    CHECK(near >= 0.9);
    CHECK(near <= 1.1);
}

TEST_CASE("fit: weekly sinusoid is recovered") {
    const auto noise = testing::white_noise(700, 17, 0.1);
    std::vector<double> y(700);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double t = static_cast<double>(i + 1);
        y[i] = 5.0 + 3.0 * std::sin(kTwoPi * t / 7.0) + noise[i];
    }
    auto config = bare_config();
    config.seasonalities = {{"weekly", 7.0, 3, 10.0}};
    const auto fit = fit_additive(make(y), config);
    const auto comp = components(fit, 1, 700);
    double sse = 0.0;
    for (std::size_t i = 0; i < 700; ++i) {
        const double truth = 3.0 * std::sin(kTwoPi * comp.days[i] / 7.0);
        sse += (comp.seasonal[0][i] - truth) * (comp.seasonal[0][i] - truth);
    }
    CHECK(std::sqrt(sse / 700.0) < 0.1);
    CHECK(fit.sigma_e == doctest::Approx(0.1).epsilon(0.15));

    for (std::size_t i = 0; i + 7 < 700; ++i) {
        CHECK(std::abs(comp.seasonal[0][i] - comp.seasonal[0][i + 7]) < 1e-9);
    }
}

TEST_CASE("fit: holiday effect is recovered") {
    const auto noise = testing::white_noise(400, 23, 0.1);
    Holiday promo{"promo", {}, 10.0};
    for (int d = 13; d <= 400; d += 37) {
        promo.days.push_back(d);
    }
    std::vector<double> y(400);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const int day = static_cast<int>(i + 1);
        const bool on = std::find(promo.days.begin(), promo.days.end(), day) != promo.days.end();
        y[i] = 10.0 + 0.01 * day + (on ? 4.0 : 0.0) + noise[i];
    }
    auto config = bare_config();
    config.holidays = {promo};
    const auto fit = fit_additive(make(y), config);
    CHECK(fit.holiday_coeffs[0] == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("fit: weaker changepoint prior never worsens the fit") {
    auto y = testing::random_walk(365, 8);
    for (double& v : y) {
        v += 50.0;
    }
    double previous = INFINITY;
    for (double tau : {0.01, 0.1, 1.0}) {
        auto config = bare_config();
        config.tau = tau;
        config.seasonalities = {{"weekly", 7.0, 3, 10.0}};
        const auto fit = fit_additive(make(y), config);
        CHECK(fit.sigma_e <= previous * (1.0 + 1e-9));
        previous = fit.sigma_e;
    }
}

TEST_CASE("fit: logistic growth") {
    std::vector<double> y(300);
    std::vector<double> cap(330, 100.0);
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = trend_logistic(static_cast<double>(i + 1), 0.04, 120.0, {}, {}, 100.0);
    }
    auto config = bare_config();
    config.trend_type = TrendType::logistic;
    config.capacity = cap;
    config.changepoints = std::vector<double>{100.0, 200.0};
    const auto fit = fit_additive(make(y), config);
    const auto comp = components(fit, 1, 300);
    double worst = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        worst = std::max(worst, std::abs(comp.total[i] - y[i]));
    }
    CHECK(worst < 0.5);
    const auto fc = forecast_additive(fit, 28);
    CHECK(fc.point.size() == 28);
    CHECK(fc.point.back() <= 100.0);
    CHECK_THROWS_AS(forecast_additive(fit, 31), InvalidArgument);
}

TEST_CASE("fit: constant series gives a flat fit with a warning") {
    const auto fit = fit_additive(make(std::vector<double>(60, 2.5)), bare_config());
    CHECK(fit.k == 0.0);
    CHECK(fit.m == 2.5);
    CHECK_FALSE(fit.warnings.empty());
    const auto fc = forecast_additive(fit, 10);
    for (double v : fc.point) {
        CHECK(v == 2.5);
    }
}

TEST_CASE("fit: invalid inputs") {
    CHECK_THROWS_AS(fit_additive(make(std::vector<double>(20, 1.0))), InvalidArgument);
    auto config = bare_config();
    config.changepoints = std::vector<double>{50.0};
    CHECK_THROWS_AS(fit_additive(make(testing::white_noise(40, 1)), config), InvalidArgument);
    config.changepoints = std::vector<double>{20.0, 10.0};
    CHECK_THROWS_AS(fit_additive(make(testing::white_noise(40, 1)), config), InvalidArgument);
    config = bare_config();
    config.tau = 0.0;
    CHECK_THROWS_AS(fit_additive(make(testing::white_noise(40, 1)), config), InvalidArgument);
    config = bare_config();
    config.trend_type = TrendType::logistic;
    config.capacity = {-1.0};
    CHECK_THROWS_AS(fit_additive(make(testing::white_noise(40, 1)), config), DomainError);
}

TEST_CASE("forecast clamps negative predictions to zero") {
    AdditiveFit fit;
    fit.config = bare_config();
    fit.config.changepoints = std::vector<double>{};
    fit.m = -0.4;
    fit.last_day = 100;
    const auto fc = forecast_additive(fit, 28);
    CHECK(fc.point.size() == 28);
    CHECK(fc.first_day == 101);
    for (double v : fc.point) {
        CHECK(v == 0.0);
    }
    fit.m = 3.0;
    for (double v : forecast_additive(fit, 5).point) {
        CHECK(v == 3.0);
    }
    CHECK_THROWS_AS(forecast_additive(fit, 0), InvalidArgument);
}

TEST_CASE("components add up to the raw prediction") {
    std::mt19937_64 rng(99);
    for (int rep = 0; rep < 1000; ++rep) {
        auto fit = random_fit(rng, rep % 2 ? TrendType::logistic : TrendType::linear);
        const auto c = components(fit, 1, 60);
        for (std::size_t i = 0; i < c.days.size(); ++i) {
            double sum = c.trend[i];
            for (const auto& s : c.seasonal) {
                sum += s[i];
            }
            sum += c.holidays[i];
            CHECK(sum == c.total[i]);
        }
        fit.holiday_coeffs.assign(fit.holiday_coeffs.size(), 0.0);
        for (double h : components(fit, 1, 400).holidays) {
            CHECK(h == 0.0);
        }
        for (double v : forecast_additive(fit, 28).point) {
            CHECK(v >= 0.0);
        }
    }
}

TEST_CASE("components serialize") {
    std::mt19937_64 rng(3);
    const auto fit = random_fit(rng, TrendType::linear);
    const auto c = components(fit, 1, 3);
    const auto csv = components_to_csv(c, fit);
    CHECK(csv.rfind("day,component,value\n", 0) == 0);
    CHECK(csv.find("1,weekly,") != std::string::npos);
    CHECK(components_to_json(c, fit).find("\"monthly\"") != std::string::npos);
}
