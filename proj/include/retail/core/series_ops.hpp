#pragma once

#include <span>
#include <vector>

#include "retail/core/timeseries.hpp"

namespace retail {

/// Applies `d` rounds of first differencing. The result starts `d` days later.
TimeSeries difference(const TimeSeries& series, int d);

/// Inverse of one differencing round: out[0] = seed + diffs[0], out[i] = out[i-1] + diffs[i].
std::vector<double> integrate(std::span<const double> diffs, double seed);

/// Sample autocorrelation for lags 0..max_lag using the n-denominator estimator.
/// Throws DegenerateInput for a constant series.
std::vector<double> acf(std::span<const double> values, int max_lag);
std::vector<double> acf(const TimeSeries& series, int max_lag);

enum class DecompositionMode { additive, multiplicative };

struct Decomposition {
    std::vector<double> level_trend;
    std::vector<double> seasonal;
    std::vector<double> residual;
    DecompositionMode mode = DecompositionMode::additive;
    int period = 1;
};

/// Classical moving-average decomposition.
///
/// The trend is a centered moving average of width `period` (a 2 x period average for even
/// periods). Ends where the window does not fit copy the nearest computed trend value. Seasonal
/// indices are per-phase means of the detrended values at positions with a computed trend,
/// re-centered to sum to zero.
///
/// Multiplicative mode is the same procedure carried out on log(y) and mapped back with exp, so
/// the seasonal factors have geometric mean one. The residual is always whatever closes the
/// reconstruction identity.
Decomposition decompose(const TimeSeries& series, int period, DecompositionMode mode);

/// Root mean squared error. Throws InvalidArgument on empty or mismatched input.
double rmse(std::span<const double> actual, std::span<const double> predicted);

}  // namespace retail
