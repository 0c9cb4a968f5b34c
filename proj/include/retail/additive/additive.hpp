#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "retail/core/timeseries.hpp"

// Additive forecaster y(t) = trend(t) + seasonalities(t) + holidays(t) + noise, fitted as a
// penalized (MAP) regression: Laplace prior on trend rate changes, normal priors on seasonal and
// holiday coefficients. Time arguments are day indices.

namespace retail::additive {

enum class TrendType { linear, logistic };

struct Seasonality {
    std::string name;
    double period = 7.0;
    int order = 3;
    double prior_sd = 10.0;
};

struct Holiday {
    std::string name;
    std::vector<int> days;
    double prior_sd = 10.0;
};

/// Weekly, monthly, quarterly and yearly terms with orders 3, 5, 5, 10.
std::vector<Seasonality> default_seasonalities();

struct AdditiveConfig {
    TrendType trend_type = TrendType::linear;
    /// Logistic carrying capacity by day, starting at the series' first day. A single value is
    /// used for every day; otherwise it must cover every day that is fitted or forecast.
    std::vector<double> capacity;
    /// Day indices of the trend changepoints. When unset, 25 are spread uniformly over the first
    /// 80% of the training window.
    std::optional<std::vector<double>> changepoints;
    double tau = 0.05;
    std::vector<Seasonality> seasonalities = default_seasonalities();
    std::vector<Holiday> holidays;
};

struct AdditiveFit {
    double k = 0.0;
    double m = 0.0;
    std::vector<double> delta;
    std::vector<double> gamma;
    /// Per seasonality, (a_n, b_n) for n = 1..order.
    std::vector<std::vector<std::pair<double, double>>> fourier_coeffs;
    std::vector<double> holiday_coeffs;
    /// Config as fitted, with changepoints always filled in.
    AdditiveConfig config;
    double sigma_e = 0.0;
    std::string series_id;
    int first_day = 1;
    int last_day = 1;
    std::vector<std::string> warnings;

    const std::vector<double>& changepoints() const { return *config.changepoints; }
};

/// a_j(t) = 1 iff t >= s_j.
std::vector<std::uint8_t> changepoint_indicator(double t, const std::vector<double>& changepoints);

/// Offsets that keep the piecewise linear trend continuous: gamma_j = -s_j * delta_j.
std::vector<double> linear_offsets(const std::vector<double>& delta, const std::vector<double>& changepoints);

/// Offsets that keep the piecewise logistic trend continuous. With rates k_0 = k and
/// k_j = k + delta_1 + ... + delta_j, gamma_j = (s_j - m_{j-1}) (1 - k_{j-1} / k_j) where
/// m_{j-1} = m + gamma_1 + ... + gamma_{j-1}.
std::vector<double> logistic_offsets(double k, double m, const std::vector<double>& delta,
                                     const std::vector<double>& changepoints);

double trend_linear(double t, double k, double m, const std::vector<double>& delta,
                    const std::vector<double>& changepoints);

/// Throws DomainError unless capacity > 0.
double trend_logistic(double t, double k, double m, const std::vector<double>& delta,
                      const std::vector<double>& changepoints, double capacity);

/// sum_n a_n cos(2 pi n t / P) + b_n sin(2 pi n t / P). Exactly P-periodic in t.
double fourier_seasonality(double t, double period, const std::vector<std::pair<double, double>>& coeffs);

/// Z[r][i] = 1 iff dates[r] is one of holiday i's days.
std::vector<std::vector<std::uint8_t>> holiday_matrix(const std::vector<int>& dates,
                                                      const std::vector<Holiday>& holidays);

/// Throws InvalidArgument on a bad config or a series shorter than twice the longest period,
/// ConvergenceError if the optimizer stalls. A constant series yields a flat fit with a warning.
AdditiveFit fit_additive(const TimeSeries& series, const AdditiveConfig& config = {});

struct Components {
    std::vector<int> days;
    std::vector<double> trend;
    /// One sequence per configured seasonality, in config order.
    std::vector<std::vector<double>> seasonal;
    std::vector<double> holidays;
    /// trend + seasonalities + holidays, summed in that order.
    std::vector<double> total;
};

Components components(const AdditiveFit& fit, int first_day, int last_day);

/// Predictions for the h days after the training window, negatives replaced by zero.
ForecastResult forecast_additive(const AdditiveFit& fit, int h);

/// Long CSV: day,component,value.
std::string components_to_csv(const Components& c, const AdditiveFit& fit);
std::string components_to_json(const Components& c, const AdditiveFit& fit);

}  // namespace retail::additive
