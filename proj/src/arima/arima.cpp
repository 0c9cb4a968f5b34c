#include "retail/arima/arima.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "retail/core/error.hpp"
#include "retail/core/linalg.hpp"
#include "retail/core/nelder_mead.hpp"
#include "retail/core/parallel.hpp"
#include "retail/core/series_ops.hpp"

namespace retail::arima {

namespace {

// Keeps log(sigma2) finite on series the model reproduces exactly (e.g. constant sales).
constexpr double kSigma2Floor = 1e-12;

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void fill_likelihood(ArimaFit& fit, std::span<const double> z, double sse, std::size_t effective) {
    const double n = static_cast<double>(effective);
    fit.sigma2 = std::max(sse / n, kSigma2Floor);
    const auto exact = exact_loglik(z, fit.c, fit.phi, fit.theta);
    fit.loglik = exact ? *exact : -0.5 * n * (std::log(2.0 * std::numbers::pi * fit.sigma2) + 1.0);
    fit.aic = 2.0 * fit.parameter_count() - 2.0 * fit.loglik;
}

// Pure AR: the conditional sum of squares is linear least squares in (c, phi).
std::vector<double> fit_ar_ols(std::span<const double> z, int p) {
    const std::size_t m = static_cast<std::size_t>(p);
    const std::size_t cols = m + 1;
    const std::size_t rows = z.size() - m;
    std::vector<double> design(rows * cols);
    std::vector<double> target(rows);
    for (std::size_t t = m; t < z.size(); ++t) {
        const std::size_t r = t - m;
        design[r * cols] = 1.0;
        for (std::size_t i = 1; i <= m; ++i) {
            design[r * cols + i] = z[t - i];
        }
        target[r] = z[t];
    }
    return linalg::least_squares(design, cols, target);
}

}  // namespace

void ArimaOrder::validate() const {
    auto ok = [](int v) { return v >= 0 && v <= kMaxOrder; };
    if (!ok(p) || !ok(d) || !ok(q)) {
        throw InvalidArgument("ARIMA order " + to_string() + " outside [0, " + std::to_string(kMaxOrder) + "]");
    }
}

std::string ArimaOrder::to_string() const {
    return "(" + std::to_string(p) + "," + std::to_string(d) + "," + std::to_string(q) + ")";
}

double css(std::span<const double> z, double c, std::span<const double> phi, std::span<const double> theta,
           std::vector<double>* residuals) {
    const std::size_t p = phi.size();
    const std::size_t q = theta.size();
    const std::size_t m = std::max(p, q);
    std::vector<double> local;
    std::vector<double>& e = residuals ? *residuals : local;
    e.assign(z.size(), 0.0);
    double sse = 0.0;
    for (std::size_t t = m; t < z.size(); ++t) {
        double pred = c;
        for (std::size_t i = 0; i < p; ++i) {
            pred += phi[i] * z[t - 1 - i];
        }
        for (std::size_t j = 0; j < q; ++j) {
            pred += theta[j] * e[t - 1 - j];
        }
        e[t] = z[t] - pred;
        sse += e[t] * e[t];
    }
    return sse;
}

bool roots_outside_unit_circle(std::span<const double> a) {
    // Step-down (Schur-Cohn) recursion: 1 - sum a_i x^i has all roots outside the unit circle
    // iff every reflection coefficient has magnitude below one.
    std::vector<double> coeffs(a.begin(), a.end());
    while (!coeffs.empty() && coeffs.back() == 0.0) {
        coeffs.pop_back();
    }
    for (std::size_t m = coeffs.size(); m > 0; --m) {
        const double k = coeffs[m - 1];
        if (!(std::abs(k) < 1.0)) {
            return false;
        }
        const double denom = 1.0 - k * k;
        std::vector<double> next(m - 1);
        for (std::size_t i = 0; i + 1 < m; ++i) {
            next[i] = (coeffs[i] + k * coeffs[m - 2 - i]) / denom;
        }
        coeffs = std::move(next);
    }
    return true;
}

ArimaFit fit_arima(const TimeSeries& series, const ArimaOrder& order, const FitOptions& options) {
    order.validate();
    const int m = std::max(order.p, order.q);
    if (series.size() < static_cast<std::size_t>(order.d + m + 10)) {
        throw InvalidArgument("series of length " + std::to_string(series.size()) + " too short for ARIMA" +
                              order.to_string());
    }
    const TimeSeries differenced = difference(series, order.d);
    const auto z = differenced.values();
    const std::size_t conditioning = static_cast<std::size_t>(m);
    const std::size_t effective = z.size() - conditioning;

    ArimaFit fit;
    fit.order = order;
    fit.conditioning = m;
    fit.series_id = series.id();
    fit.start_day = series.start_day();
    fit.history.assign(series.values().begin(), series.values().end());

    const std::size_t p = static_cast<std::size_t>(order.p);
    const std::size_t q = static_cast<std::size_t>(order.q);
    std::vector<double> params;  // c, phi..., theta...

    if (q == 0) {
        params = fit_ar_ols(z, order.p);
    } else {
        const double z_mean = mean_of(z);
        // The CSS recursion only yields innovations for an invertible MA part, so the search is
        // confined to that region.
        std::vector<double> neg_theta(q);
        auto objective = [&](std::span<const double> x) {
            const auto theta = x.subspan(1 + p, q);
            for (std::size_t j = 0; j < q; ++j) {
                neg_theta[j] = -theta[j];
            }
            if (!roots_outside_unit_circle(neg_theta)) {
                return std::numeric_limits<double>::infinity();
            }
            return css(z, x[0], x.subspan(1, p), theta);
        };
        NelderMeadOptions nm;
        nm.max_iterations = options.max_iterations;
        nm.relative_tolerance = options.relative_tolerance;
        nm.initial_step = 0.1;

        std::optional<NelderMeadResult> best;
        bool any_converged = false;
        for (int start = 0; start < 3; ++start) {
            std::vector<double> x0(1 + p + q, 0.0);
            x0[0] = z_mean;
            const double jitter = start == 0 ? 0.0 : (start == 1 ? 0.1 : -0.1);
            for (std::size_t i = 1; i < x0.size(); ++i) {
                x0[i] = (i % 2 == 1) ? jitter : -jitter;
            }
            auto run = nelder_mead(objective, std::move(x0), nm);
            // A collapsed simplex can stall short of the optimum; restart once from its best vertex.
            if (run.converged) {
                auto polished = nelder_mead(objective, run.x, nm);
                if (polished.value <= run.value) {
                    polished.converged = polished.converged || run.converged;
                    run = std::move(polished);
                }
            }
            any_converged = any_converged || run.converged;
            if (!best || run.value < best->value) {
                best = std::move(run);
            }
        }
        if (!any_converged) {
            throw ConvergenceError("ARIMA" + order.to_string() + " CSS search did not converge in " +
                                       std::to_string(options.max_iterations) + " iterations",
                                   best->x, best->value);
        }
        params = best->x;
    }

    fit.c = params[0];
    fit.phi.assign(params.begin() + 1, params.begin() + 1 + static_cast<std::ptrdiff_t>(p));
    fit.theta.assign(params.begin() + 1 + static_cast<std::ptrdiff_t>(p), params.end());
    const double sse = css(z, fit.c, fit.phi, fit.theta, &fit.residuals);
    if (!std::isfinite(sse)) {
        throw ConvergenceError("ARIMA" + order.to_string() + " produced a non-finite sum of squares", params, sse);
    }
    fill_likelihood(fit, z, sse, effective);

    fit.stationary = roots_outside_unit_circle(fit.phi);
    std::vector<double> neg_theta(fit.theta.size());
    std::transform(fit.theta.begin(), fit.theta.end(), neg_theta.begin(), [](double t) { return -t; });
    fit.invertible = roots_outside_unit_circle(neg_theta);
    return fit;
}

GridSearchResult grid_search_arima(const TimeSeries& series, const GridSearchOptions& options) {
    std::vector<ArimaOrder> orders;
    for (int p = 0; p <= options.p_max; ++p) {
        for (int d = 0; d <= options.d_max; ++d) {
            for (int q = 0; q <= options.q_max; ++q) {
                orders.push_back({p, d, q});
            }
        }
    }
    std::vector<std::optional<ArimaFit>> fits(orders.size());
    std::vector<std::string> errors(orders.size());
    parallel_for(orders.size(), options.workers, [&](std::size_t i) {
        try {
            fits[i] = fit_arima(series, orders[i], options.fit);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    GridSearchResult result;
    std::optional<std::size_t> best;
    auto better = [&](std::size_t a, std::size_t b) {
        const ArimaFit& fa = *fits[a];
        const ArimaFit& fb = *fits[b];
        if (fa.aic != fb.aic) {
            return fa.aic < fb.aic;
        }
        if (fa.flagged() != fb.flagged()) {
            return !fa.flagged();
        }
        if (orders[a].total() != orders[b].total()) {
            return orders[a].total() < orders[b].total();
        }
        return orders[a] < orders[b];
    };
    std::vector<std::string> failures;
    for (std::size_t i = 0; i < orders.size(); ++i) {
        GridCandidate candidate{orders[i], std::nullopt, false, errors[i]};
        if (fits[i]) {
            candidate.aic = fits[i]->aic;
            candidate.flagged = fits[i]->flagged();
            if (!best || better(i, *best)) {
                best = i;
            }
        } else {
            failures.push_back("ARIMA" + orders[i].to_string() + ": " + errors[i]);
        }
        result.candidates.push_back(std::move(candidate));
    }
    if (!best) {
        throw AggregateError("every ARIMA candidate failed for series '" + series.id() + "':", std::move(failures));
    }
    result.order = orders[*best];
    result.fit = std::move(*fits[*best]);
    return result;
}

std::vector<double> psi_weights(const ArimaFit& fit, int count) {
    // Full AR operator (1 - sum phi_i B^i)(1 - B)^d as polynomial coefficients.
    std::vector<double> poly(1 + fit.phi.size());
    poly[0] = 1.0;
    for (std::size_t i = 0; i < fit.phi.size(); ++i) {
        poly[i + 1] = -fit.phi[i];
    }
    for (int k = 0; k < fit.order.d; ++k) {
        std::vector<double> next(poly.size() + 1, 0.0);
        for (std::size_t i = 0; i < poly.size(); ++i) {
            next[i] += poly[i];
            next[i + 1] -= poly[i];
        }
        poly = std::move(next);
    }
    std::vector<double> psi(static_cast<std::size_t>(std::max(count, 0)), 0.0);
    for (std::size_t j = 0; j < psi.size(); ++j) {
        if (j == 0) {
            psi[0] = 1.0;
            continue;
        }
        double v = j <= fit.theta.size() ? fit.theta[j - 1] : 0.0;
        for (std::size_t i = 1; i < poly.size() && i <= j; ++i) {
            v += -poly[i] * psi[j - i];
        }
        psi[j] = v;
    }
    return psi;
}

ForecastResult forecast_arima(const ArimaFit& fit, int h, double coverage) {
    if (h < 1) {
        throw InvalidArgument("forecast horizon must be at least 1");
    }
    if (!(coverage > 0.0 && coverage < 1.0)) {
        throw InvalidArgument("interval coverage must be in (0, 1)");
    }
    const TimeSeries original(fit.series_id, fit.start_day, fit.history);
    const TimeSeries differenced = difference(original, fit.order.d);
    std::vector<double> z(differenced.values().begin(), differenced.values().end());
    std::vector<double> e = fit.residuals;
    const std::size_t horizon = static_cast<std::size_t>(h);

    for (std::size_t step = 0; step < horizon; ++step) {
        const std::size_t t = z.size();
        double pred = fit.c;
        for (std::size_t i = 0; i < fit.phi.size(); ++i) {
            pred += fit.phi[i] * z[t - 1 - i];
        }
        for (std::size_t j = 0; j < fit.theta.size(); ++j) {
            pred += fit.theta[j] * e[t - 1 - j];
        }
        z.push_back(pred);
        e.push_back(0.0);
    }
    std::vector<double> level(z.end() - static_cast<std::ptrdiff_t>(horizon), z.end());
    // Undo each differencing round, seeding with the last value of the next-lower level.
    for (int k = fit.order.d; k >= 1; --k) {
        const TimeSeries lower = difference(original, k - 1);
        level = integrate(level, lower.values().back());
    }

    ForecastResult out;
    out.series_id = fit.series_id;
    out.first_day = original.end_day() + 1;
    out.point = level;
    const double zq = boost::math::quantile(boost::math::normal(), 0.5 + 0.5 * coverage);
    const auto psi = psi_weights(fit, h);
    out.lower.emplace(horizon);
    out.upper.emplace(horizon);
    double cumulative = 0.0;
    for (std::size_t j = 0; j < horizon; ++j) {
        cumulative += psi[j] * psi[j];
        const double half_width = zq * std::sqrt(fit.sigma2 * cumulative);
        (*out.lower)[j] = level[j] - half_width;
        (*out.upper)[j] = level[j] + half_width;
    }
    return out;
}

}  // namespace retail::arima
