#include "retail/core/series_ops.hpp"

#include <cmath>
#include <numeric>

#include "retail/core/error.hpp"
#include "retail/simd/kernels.hpp"

namespace retail {

TimeSeries difference(const TimeSeries& series, int d) {
    if (d < 0 || static_cast<std::size_t>(d) > series.size() - 1) {
        throw InvalidArgument("difference order " + std::to_string(d) + " too large for series of length " +
                              std::to_string(series.size()));
    }
    std::vector<double> values(series.values().begin(), series.values().end());
    for (int round = 0; round < d; ++round) {
        for (std::size_t i = 0; i + 1 < values.size(); ++i) {
            values[i] = values[i + 1] - values[i];
        }
        values.pop_back();
    }
    return {series.id(), series.start_day() + d, std::move(values)};
}

std::vector<double> integrate(std::span<const double> diffs, double seed) {
    std::vector<double> out(diffs.size());
    double level = seed;
    for (std::size_t i = 0; i < diffs.size(); ++i) {
        level += diffs[i];
        out[i] = level;
    }
    return out;
}

std::vector<double> acf(std::span<const double> values, int max_lag) {
    const std::size_t n = values.size();
    if (max_lag < 0 || static_cast<std::size_t>(max_lag) >= n) {
        throw InvalidArgument("acf max_lag must be in [0, n)");
    }
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
    std::vector<double> centered(n);
    for (std::size_t i = 0; i < n; ++i) {
        centered[i] = values[i] - mean;
    }
    const double c0 = simd::dot(centered, centered);
    if (!(c0 > 0.0)) {
        throw DegenerateInput("acf of a constant series is undefined");
    }
    std::vector<double> out(static_cast<std::size_t>(max_lag) + 1);
    out[0] = 1.0;
    const std::span<const double> c(centered);
    for (int h = 1; h <= max_lag; ++h) {
        const std::size_t lag = static_cast<std::size_t>(h);
        out[lag] = simd::dot(c.subspan(0, n - lag), c.subspan(lag)) / c0;
    }
    return out;
}

std::vector<double> acf(const TimeSeries& series, int max_lag) {
    return acf(series.values(), max_lag);
}

namespace {

struct AdditiveParts {
    std::vector<double> trend;
    std::vector<double> seasonal;
};

AdditiveParts classical_additive(std::span<const double> y, int period) {
    const std::size_t n = y.size();
    const std::size_t p = static_cast<std::size_t>(period);
    std::vector<double> trend(n, 0.0);
    std::vector<std::uint8_t> computed(n, 0);

    // Odd period: plain window of `period` centered on i. Even period: the 2 x period average,
    // i.e. weights 1/(2p) on the two outermost points and 1/p inside.
    const std::size_t half = p / 2;
    for (std::size_t i = half; i + half < n; ++i) {
        double sum = 0.0;
        if (p % 2 == 1) {
            for (std::size_t j = i - half; j <= i + half; ++j) {
                sum += y[j];
            }
            sum /= static_cast<double>(p);
        } else {
            sum = 0.5 * (y[i - half] + y[i + half]);
            for (std::size_t j = i - half + 1; j < i + half; ++j) {
                sum += y[j];
            }
            sum /= static_cast<double>(p);
        }
        trend[i] = sum;
        computed[i] = 1;
    }
    for (std::size_t i = 0; i < half; ++i) {
        trend[i] = trend[half];
    }
    for (std::size_t i = n - half; i < n; ++i) {
        trend[i] = trend[n - half - 1];
    }

    std::vector<double> phase_sum(p, 0.0);
    std::vector<std::size_t> phase_count(p, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (computed[i]) {
            phase_sum[i % p] += y[i] - trend[i];
            ++phase_count[i % p];
        }
    }
    std::vector<double> index(p, 0.0);
    for (std::size_t k = 0; k < p; ++k) {
        index[k] = phase_count[k] ? phase_sum[k] / static_cast<double>(phase_count[k]) : 0.0;
    }
    const double centre = std::accumulate(index.begin(), index.end(), 0.0) / static_cast<double>(p);
    for (double& v : index) {
        v -= centre;
    }
    std::vector<double> seasonal(n);
    for (std::size_t i = 0; i < n; ++i) {
        seasonal[i] = index[i % p];
    }
    return {std::move(trend), std::move(seasonal)};
}

}  // namespace

Decomposition decompose(const TimeSeries& series, int period, DecompositionMode mode) {
    const std::size_t n = series.size();
    if (period < 1) {
        throw InvalidArgument("decomposition period must be positive");
    }
    if (n < 2 * static_cast<std::size_t>(period)) {
        throw InvalidArgument("series too short: decomposition needs at least two full periods");
    }
    const auto y = series.values();
    Decomposition out;
    out.mode = mode;
    out.period = period;
    out.residual.resize(n);

    if (mode == DecompositionMode::additive) {
        auto parts = classical_additive(y, period);
        for (std::size_t i = 0; i < n; ++i) {
            out.residual[i] = y[i] - parts.trend[i] - parts.seasonal[i];
        }
        out.level_trend = std::move(parts.trend);
        out.seasonal = std::move(parts.seasonal);
        return out;
    }

    std::vector<double> logs(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(y[i] > 0.0)) {
            throw DomainError("multiplicative decomposition requires strictly positive values (day " +
                              std::to_string(series.start_day() + static_cast<int>(i)) + ")");
        }
        logs[i] = std::log(y[i]);
    }
    auto parts = classical_additive(logs, period);
    out.level_trend.resize(n);
    out.seasonal.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.level_trend[i] = std::exp(parts.trend[i]);
        out.seasonal[i] = std::exp(parts.seasonal[i]);
        out.residual[i] = y[i] / (out.level_trend[i] * out.seasonal[i]);
    }
    return out;
}

double rmse(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.empty() || actual.size() != predicted.size()) {
        throw InvalidArgument("rmse needs two non-empty sequences of equal length");
    }
    return std::sqrt(simd::sum_squared_diff(actual, predicted) / static_cast<double>(actual.size()));
}

}  // namespace retail
