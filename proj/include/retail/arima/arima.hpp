#pragma once

#include <compare>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "retail/core/timeseries.hpp"

namespace retail::arima {

/// Cap on each of p, d, q.
inline constexpr int kMaxOrder = 5;

struct ArimaOrder {
    int p = 0;
    int d = 0;
    int q = 0;

    /// Throws InvalidArgument unless every component is in [0, kMaxOrder].
    void validate() const;
    int total() const noexcept { return p + d + q; }
    std::string to_string() const;

    friend auto operator<=>(const ArimaOrder&, const ArimaOrder&) = default;
};

/// ARIMA(p,d,q) fitted by conditional sum of squares on the d-times differenced series z:
///
///   z_t = c + sum_i phi_i z_{t-i} + sum_j theta_j e_{t-j} + e_t
///
/// conditioning on the first max(p,q) values of z with pre-sample errors set to zero.
///
/// `loglik` is the exact Gaussian log-likelihood of z at the fitted parameters (variance
/// profiled), so that AIC penalizes stationary fits whose implied mean and variance cannot
/// explain the start of the series. For non-stationary AR estimates, where that likelihood does
/// not exist, it falls back to the conditional likelihood of the CSS residuals.
struct ArimaFit {
    ArimaOrder order;
    double c = 0.0;
    std::vector<double> phi;
    std::vector<double> theta;
    double sigma2 = 0.0;
    double loglik = 0.0;
    double aic = 0.0;
    /// One entry per differenced observation (n - d); the first `conditioning` are zero.
    std::vector<double> residuals;
    /// Leading residuals (on the differenced scale) fixed at zero by the conditioning.
    int conditioning = 0;
    bool stationary = true;
    bool invertible = true;

    /// Training series on the original scale, needed to invert differencing when forecasting.
    std::string series_id;
    int start_day = 1;
    std::vector<double> history;

    bool flagged() const noexcept { return !stationary || !invertible; }
    /// Number of estimated parameters: p + q + intercept + innovation variance.
    int parameter_count() const noexcept { return order.p + order.q + 2; }
};

struct FitOptions {
    int max_iterations = 2000;
    double relative_tolerance = 1e-10;
};

/// Throws InvalidArgument if the series is shorter than d + max(p,q) + 10, ConvergenceError if
/// the simplex search exhausts its iteration budget from every starting point.
ArimaFit fit_arima(const TimeSeries& series, const ArimaOrder& order, const FitOptions& options = {});

/// Conditional sum of squares for given parameters on an already differenced series. The
/// recursion starts at max(p,q) with zero pre-sample errors. Residuals are written when requested.
double css(std::span<const double> z, double c, std::span<const double> phi, std::span<const double> theta,
           std::vector<double>* residuals = nullptr);

/// Exact Gaussian log-likelihood of a stationary ARMA for z, innovation variance profiled out,
/// computed with a Kalman filter started from the stationary state covariance. Empty when the AR
/// part is not stationary.
std::optional<double> exact_loglik(std::span<const double> z, double c, std::span<const double> phi,
                                   std::span<const double> theta);

/// True when every root of 1 - sum_i a_i x^i lies strictly outside the unit circle.
/// AR stationarity: a = phi. MA invertibility: a = -theta.
bool roots_outside_unit_circle(std::span<const double> a);

struct GridCandidate {
    ArimaOrder order;
    std::optional<double> aic;
    bool flagged = false;
    std::string error;
};

struct GridSearchOptions {
    int p_max = 2;
    int d_max = 2;
    int q_max = 2;
    /// Concurrent candidate fits; 0 uses the hardware thread count.
    unsigned workers = 1;
    FitOptions fit;
};

struct GridSearchResult {
    ArimaOrder order;
    ArimaFit fit;
    std::vector<GridCandidate> candidates;
};

/// Fits every order in [0,p_max] x [0,d_max] x [0,q_max] and keeps the lowest AIC. Ties prefer
/// unflagged fits, then the smallest p+d+q, then lexicographic order. Failed candidates are
/// recorded and skipped; AggregateError if all fail.
GridSearchResult grid_search_arima(const TimeSeries& series, const GridSearchOptions& options = {});

/// h-step forecasts with future innovations set to zero, mapped back through the differences.
/// Intervals are point +/- z * sigma * sqrt(sum of squared psi weights) at the given coverage.
ForecastResult forecast_arima(const ArimaFit& fit, int h, double coverage = 0.95);

/// psi weights psi_0..psi_{count-1} of the MA(infinity) form of the full (undifferenced) model.
std::vector<double> psi_weights(const ArimaFit& fit, int count);

struct HistogramBin {
    double lower = 0.0;
    double upper = 0.0;
    std::size_t count = 0;
};

/// Plot data for residual checks: standardized residuals over time, their correlogram, a
/// normal QQ plot and a histogram.
struct DiagnosticsBundle {
    std::vector<double> standardized_residuals;
    std::vector<double> residual_acf;  // lags 0..20
    std::vector<std::pair<double, double>> qq_points;  // (theoretical quantile, sample quantile)
    std::vector<HistogramBin> histogram_bins;
};

/// Uses the residuals after the conditioning prefix. Throws InvalidArgument below 20 of them.
DiagnosticsBundle diagnostics(const ArimaFit& fit);

std::string diagnostics_to_json(const DiagnosticsBundle& bundle, const ArimaFit& fit);
/// Long CSV: section,index,x,y with sections residual, acf, qq, histogram.
std::string diagnostics_to_csv(const DiagnosticsBundle& bundle);

}  // namespace retail::arima
