#include <cmath>
#include <numbers>
#include <numeric>

#include "doctest.h"
#include "retail/arima/arima.hpp"
#include "retail/core/error.hpp"
#include "retail/core/series_ops.hpp"
#include "support/simulate.hpp"

using namespace retail;
using namespace retail::arima;

namespace {

TimeSeries make(std::vector<double> v) {
    return {"sim", 1, std::move(v)};
}

// AR(2) stationarity region is the triangle |phi2| < 1, phi1 + phi2 < 1, phi2 - phi1 < 1.
bool ar2_triangle(double phi1, double phi2) {
    return std::abs(phi2) < 1.0 && phi1 + phi2 < 1.0 && phi2 - phi1 < 1.0;
}

}  // namespace

TEST_CASE("order validation") {
    CHECK_NOTHROW((ArimaOrder{5, 5, 5}.validate()));
    CHECK_THROWS_AS((ArimaOrder{6, 0, 0}.validate()), InvalidArgument);
    CHECK_THROWS_AS((ArimaOrder{0, -1, 0}.validate()), InvalidArgument);
    CHECK(ArimaOrder{1, 1, 1}.to_string() == "(1,1,1)");
}

TEST_CASE("unit-circle root test matches closed forms") {
    CHECK(roots_outside_unit_circle(std::vector<double>{}));
    CHECK(roots_outside_unit_circle(std::vector<double>{0.5}));
    CHECK_FALSE(roots_outside_unit_circle(std::vector<double>{1.2}));
    CHECK_FALSE(roots_outside_unit_circle(std::vector<double>{-1.0}));
    auto grid = testing::uniform(400, -2.2, 2.2, 3);
    for (std::size_t i = 0; i + 1 < grid.size(); i += 2) {
        const double phi1 = grid[i];
        const double phi2 = grid[i + 1] / 2.2;
        CHECK(roots_outside_unit_circle(std::vector<double>{phi1, phi2}) == ar2_triangle(phi1, phi2));
    }
}

TEST_CASE("ARIMA(0,0,0) is the sample mean and biased variance") {
    auto y = testing::white_noise(300, 9, 2.0);
    for (double& v : y) {
        v += 4.0;
    }
    auto fit = fit_arima(make(y), {0, 0, 0});
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / 300.0;
    double var = 0.0;
    for (double v : y) {
        var += (v - mean) * (v - mean);
    }
    var /= 300.0;
    CHECK(fit.c == doctest::Approx(mean).epsilon(1e-12));
    CHECK(fit.sigma2 == doctest::Approx(var).epsilon(1e-10));
    CHECK(fit.aic == doctest::Approx(2.0 * 2 - 2.0 * fit.loglik));
    CHECK(fit.loglik == doctest::Approx(-150.0 * (std::log(2.0 * std::numbers::pi * var) + 1.0)).epsilon(1e-10));

    auto fc = forecast_arima(fit, 5);
    for (double v : fc.point) {
        CHECK(v == doctest::Approx(fit.c).epsilon(1e-15));
    }
}

namespace {

// Dense multivariate normal log-density with autocovariances from a long psi-weight sum and the
// variance profiled out, via a plain Cholesky factorization.
double dense_loglik(const std::vector<double>& z, double c, const std::vector<double>& phi,
                    const std::vector<double>& theta) {
    const std::size_t n = z.size();
    std::vector<double> psi(5000, 0.0);
    for (std::size_t j = 0; j < psi.size(); ++j) {
        double v = j == 0 ? 1.0 : (j <= theta.size() ? theta[j - 1] : 0.0);
        for (std::size_t i = 1; i <= phi.size() && i <= j; ++i) {
            v += phi[i - 1] * psi[j - i];
        }
        psi[j] = v;
    }
    std::vector<double> gamma(n, 0.0);
    for (std::size_t h = 0; h < n; ++h) {
        for (std::size_t j = 0; j + h < psi.size(); ++j) {
            gamma[h] += psi[j] * psi[j + h];
        }
    }
    std::vector<double> l(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = gamma[i - j];
            for (std::size_t k = 0; k < j; ++k) {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = i == j ? std::sqrt(s) : s / l[j * n + j];
        }
    }
    double phi_sum = 0.0;
    for (double f : phi) {
        phi_sum += f;
    }
    const double mean = c / (1.0 - phi_sum);
    std::vector<double> w(n);
    double quad = 0.0;
    double log_det = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = z[i] - mean;
        for (std::size_t k = 0; k < i; ++k) {
            s -= l[i * n + k] * w[k];
        }
        w[i] = s / l[i * n + i];
        quad += w[i] * w[i];
        log_det += 2.0 * std::log(l[i * n + i]);
    }
    const double nn = static_cast<double>(n);
    return -0.5 * nn * (std::log(2.0 * std::numbers::pi * quad / nn) + 1.0) - 0.5 * log_det;
}

}  // namespace

TEST_CASE("exact likelihood matches the dense Gaussian density") {
    const auto z = testing::white_noise(60, 77);
    struct Case {
        double c;
        std::vector<double> phi;
        std::vector<double> theta;
    };
    const std::vector<Case> cases{
        {0.3, {}, {}},
        {0.3, {0.6}, {}},
        {-0.2, {}, {0.5}},
        {0.1, {0.5, -0.3}, {0.4}},
        {0.0, {1.2, -0.4}, {-0.3, 0.2}},
        {0.5, {0.97}, {}},
        {0.0, {}, {-1.0}},
    };
    for (const auto& tc : cases) {
        const auto got = exact_loglik(z, tc.c, tc.phi, tc.theta);
        REQUIRE(got.has_value());
        CHECK(*got == doctest::Approx(dense_loglik(z, tc.c, tc.phi, tc.theta)).epsilon(1e-9));
    }
    CHECK_FALSE(exact_loglik(z, 0.0, std::vector<double>{1.0}, std::vector<double>{}).has_value());
    CHECK_FALSE(exact_loglik(z, 0.0, std::vector<double>{0.5, 0.6}, std::vector<double>{}).has_value());
}

TEST_CASE("fit_arima recovers AR(1) and MA(1)") {
    auto ar = fit_arima(make(testing::simulate_ar1(2000, 0.7, 0.0, 101)), {1, 0, 0});
    CHECK(ar.phi[0] >= 0.62);
    CHECK(ar.phi[0] <= 0.78);
    CHECK(ar.stationary);

    auto ma = fit_arima(make(testing::simulate_ma1(2000, 0.5, 0.0, 202)), {0, 0, 1});
    CHECK(ma.theta[0] >= 0.40);
    CHECK(ma.theta[0] <= 0.60);
    CHECK(ma.invertible);
    CHECK(ma.residuals.size() == 2000);
    CHECK(ma.residuals[0] == 0.0);
}

TEST_CASE("fit_arima: CSS optimum is a stationary point of the simplex search") {
    auto y = testing::simulate_ar1(600, 0.5, 1.0, 77);
    auto fit = fit_arima(make(y), {1, 0, 1});
    const auto z = std::span<const double>(y);
    const double at_opt = css(z, fit.c, fit.phi, fit.theta);
    const double step = 1e-3;
    CHECK(css(z, fit.c + step, fit.phi, fit.theta) >= at_opt);
    CHECK(css(z, fit.c - step, fit.phi, fit.theta) >= at_opt);
    CHECK(css(z, fit.c, std::vector<double>{fit.phi[0] + step}, fit.theta) >= at_opt);
    CHECK(css(z, fit.c, fit.phi, std::vector<double>{fit.theta[0] - step}) >= at_opt);
    CHECK(fit.parameter_count() == 4);
}

TEST_CASE("fit_arima errors") {
    CHECK_THROWS_AS(fit_arima(make(std::vector<double>(11, 1.0)), {1, 1, 1}), InvalidArgument);
    CHECK_THROWS_AS(fit_arima(make(testing::white_noise(100, 1)), {7, 0, 0}), InvalidArgument);
    FitOptions tight;
    tight.max_iterations = 3;
    CHECK_THROWS_AS(fit_arima(make(testing::simulate_ma1(300, 0.4, 0.0, 5)), {0, 0, 2}, tight), ConvergenceError);
}

TEST_CASE("parameter recovery over 20 AR(1) simulations") {
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto fit = fit_arima(make(testing::simulate_ar1(2000, 0.7, 0.0, 1000 + seed)), {1, 0, 0});
        total += std::abs(fit.phi[0] - 0.7);
    }
    CHECK(total / 20.0 < 0.03);
}

TEST_CASE("forecast: random walk repeats the last value") {
    auto y = testing::random_walk(200, 4);
    ArimaFit fit = fit_arima(make(y), {0, 1, 0});
    fit.c = 0.0;
    auto fc = forecast_arima(fit, 28);
    CHECK(fc.horizon() == 28);
    CHECK(fc.first_day == 201);
    for (double v : fc.point) {
        CHECK(v == y.back());
    }
    // Random-walk forecast variance grows linearly: psi_j = 1.
    for (std::size_t j = 0; j < 28; ++j) {
        const double half = (*fc.upper)[j] - fc.point[j];
        CHECK(half == doctest::Approx(1.959963984540054 * std::sqrt(fit.sigma2 * static_cast<double>(j + 1))));
    }
}

TEST_CASE("forecast: AR(1) closed form") {
    auto y = testing::simulate_ar1(800, 0.6, 2.0, 8);
    auto fit = fit_arima(make(y), {1, 0, 0});
    const double phi = fit.phi[0];
    const double mu = fit.c / (1.0 - phi);
    auto fc = forecast_arima(fit, 10);
    for (int h = 1; h <= 10; ++h) {
        CHECK(fc.point[h - 1] == doctest::Approx(mu + std::pow(phi, h) * (y.back() - mu)).epsilon(1e-12));
    }
    auto psi = psi_weights(fit, 4);
    CHECK(psi[3] == doctest::Approx(std::pow(phi, 3)));
}

TEST_CASE("forecast: d=1 equals cumulative sum of the differenced-model forecast") {
    auto y = testing::random_walk(500, 12);
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] += 0.3 * std::sin(static_cast<double>(i));
    }
    auto fit = fit_arima(make(y), {1, 1, 1});
    auto fc = forecast_arima(fit, 15);

    ArimaFit on_diff = fit;
    on_diff.order.d = 0;
    auto dz = difference(make(y), 1);
    on_diff.history.assign(dz.values().begin(), dz.values().end());
    auto zfc = forecast_arima(on_diff, 15);
    auto rebuilt = integrate(zfc.point, y.back());
    for (std::size_t j = 0; j < rebuilt.size(); ++j) {
        CHECK(rebuilt[j] == fc.point[j]);
    }
    CHECK_THROWS_AS(forecast_arima(fit, 0), InvalidArgument);
}

TEST_CASE("grid search picks the minimum AIC") {
    auto y = testing::simulate_ar1(400, 0.5, 0.0, 31);
    GridSearchOptions opts;
    opts.workers = 2;
    auto result = grid_search_arima(make(y), opts);
    CHECK(result.candidates.size() == 27);
    for (const auto& c : result.candidates) {
        if (c.aic) {
            CHECK(result.fit.aic <= *c.aic);
        }
    }
    // Deterministic regardless of worker count.
    opts.workers = 1;
    auto serial = grid_search_arima(make(y), opts);
    CHECK(serial.order == result.order);
    CHECK(serial.fit.aic == result.fit.aic);
}

TEST_CASE("grid search: white noise stays undifferenced, random walk is differenced") {
    auto wn = grid_search_arima(make(testing::white_noise(1000, 2024)));
    CHECK(wn.order.d == 0);
    CHECK(wn.order.p + wn.order.q <= 1);
    auto rw = grid_search_arima(make(testing::random_walk(1000, 2024)));
    CHECK(rw.order.d >= 1);
}

TEST_CASE("grid search aggregates failures") {
    GridSearchOptions opts;
    opts.p_max = 5;
    opts.d_max = 0;
    opts.q_max = 0;
    // Length 12 admits p <= 2 only; the rest fail but do not abort the search.
    auto r = grid_search_arima(make(testing::white_noise(12, 3)), opts);
    CHECK(r.order.p <= 2);
    std::size_t failed = 0;
    for (const auto& c : r.candidates) {
        failed += c.aic ? 0 : 1;
    }
    CHECK(failed == 3);
    opts.p_max = 0;
    opts.d_max = 5;
    CHECK_THROWS_AS(grid_search_arima(make(std::vector<double>(5, 1.0)), opts), AggregateError);
}

TEST_CASE("diagnostics on a correctly specified AR(1)") {
    auto fit = fit_arima(make(testing::simulate_ar1(2000, 0.7, 0.0, 55)), {1, 0, 0});
    auto bundle = diagnostics(fit);
    const double n = static_cast<double>(bundle.standardized_residuals.size());
    int inside = 0;
    for (std::size_t h = 1; h <= 20; ++h) {
        inside += std::abs(bundle.residual_acf[h]) < 2.0 / std::sqrt(n) ? 1 : 0;
    }
    CHECK(inside >= 18);

    const double mean = std::accumulate(bundle.standardized_residuals.begin(), bundle.standardized_residuals.end(), 0.0) / n;
    double var = 0.0;
    for (double r : bundle.standardized_residuals) {
        var += (r - mean) * (r - mean);
    }
    var /= n - 1.0;
    CHECK(var >= 0.8);
    CHECK(var <= 1.2);

    std::size_t total = 0;
    for (const auto& bin : bundle.histogram_bins) {
        total += bin.count;
    }
    CHECK(bundle.histogram_bins.size() == 20);
    CHECK(total == fit.residuals.size() - static_cast<std::size_t>(fit.conditioning));
    CHECK(bundle.qq_points.size() == total);
    CHECK(bundle.qq_points.front().first < 0.0);
    CHECK(std::is_sorted(bundle.qq_points.begin(), bundle.qq_points.end()));

    CHECK(diagnostics_to_json(bundle, fit).find("\"residual_acf\"") != std::string::npos);
    CHECK(diagnostics_to_csv(bundle).rfind("section,index,x,y\n", 0) == 0);
}

TEST_CASE("diagnostics need 20 residuals") {
    auto fit = fit_arima(make(testing::white_noise(15, 1)), {0, 0, 0});
    CHECK_THROWS_AS(diagnostics(fit), InvalidArgument);
}
