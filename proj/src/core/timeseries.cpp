#include "retail/core/timeseries.hpp"

#include <algorithm>

#include "retail/core/error.hpp"

namespace retail {

TimeSeries::TimeSeries(std::string series_id, int start_day, std::vector<double> values)
    : id_(std::move(series_id)), start_day_(start_day), values_(std::move(values)) {
    if (values_.empty()) {
        throw InvalidArgument("time series '" + id_ + "' has no observations");
    }
    if (start_day_ < 1) {
        throw InvalidArgument("time series '" + id_ + "' starts before day 1");
    }
}

TimeSeries TimeSeries::head(std::size_t n) const {
    if (n == 0 || n > values_.size()) {
        throw InvalidArgument("head length out of range");
    }
    return {id_, start_day_, std::vector<double>(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(n))};
}

TimeSeries TimeSeries::tail(std::size_t n) const {
    if (n == 0 || n > values_.size()) {
        throw InvalidArgument("tail length out of range");
    }
    const std::size_t skip = values_.size() - n;
    return {id_, start_day_ + static_cast<int>(skip),
            std::vector<double>(values_.begin() + static_cast<std::ptrdiff_t>(skip), values_.end())};
}

void clamp_non_negative(ForecastResult& forecast) {
    auto clamp = [](std::vector<double>& v) {
        for (double& x : v) {
            x = std::max(x, 0.0);
        }
    };
    clamp(forecast.point);
    if (forecast.lower) {
        clamp(*forecast.lower);
    }
    if (forecast.upper) {
        clamp(*forecast.upper);
    }
}

}  // namespace retail
