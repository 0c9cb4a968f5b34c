#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace retail {

/// Daily series for one (item, store) pair. Day 1 is the first calendar date of the dataset.
class TimeSeries {
public:
    TimeSeries(std::string series_id, int start_day, std::vector<double> values);

    const std::string& id() const noexcept { return id_; }
    int start_day() const noexcept { return start_day_; }
    int end_day() const noexcept { return start_day_ + static_cast<int>(values_.size()) - 1; }
    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }

    /// First `n` observations (the training part of a holdout split).
    TimeSeries head(std::size_t n) const;
    /// Last `n` observations.
    TimeSeries tail(std::size_t n) const;

private:
    std::string id_;
    int start_day_;
    std::vector<double> values_;
};

/// Point forecasts for the days following a series, optionally with a symmetric interval.
struct ForecastResult {
    std::string series_id;
    int first_day = 0;
    std::vector<double> point;
    std::optional<std::vector<double>> lower;
    std::optional<std::vector<double>> upper;

    std::size_t horizon() const noexcept { return point.size(); }
};

/// Replaces negative point forecasts (and interval bounds) by zero.
void clamp_non_negative(ForecastResult& forecast);

}  // namespace retail
