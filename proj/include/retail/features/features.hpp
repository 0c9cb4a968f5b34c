#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "retail/core/column.hpp"
#include "retail/core/timeseries.hpp"
#include "retail/ingest/tables.hpp"

namespace retail::features {

/// values[t] = series[t - k] for t >= k, missing before. Throws InvalidArgument unless
/// 1 <= k < length.
NullableColumn make_lag(const TimeSeries& series, int k);

/// Trailing mean over `window` positions ending at each position; missing when any of them is.
/// Summed oldest first. Throws InvalidArgument if window < 1.
NullableColumn rolling_mean(const NullableColumn& values, int window);

/// A lagged rolling mean: the mean of series values lag+window-1 .. lag days back.
/// window == 1 is the plain lag.
struct LagSpec {
    std::string_view name;
    int lag;
    int window;
};

/// lag_7, lag_28, rmean_7_7, rmean_28_7, rmean_7_28, rmean_28_28. rmean_<w>_<k> is the
/// <w>-day rolling mean of lag_<k>.
inline constexpr std::array<LagSpec, 6> kLagFeatures{{
    {"lag_7", 7, 1},
    {"lag_28", 28, 1},
    {"rmean_7_7", 7, 7},
    {"rmean_28_7", 7, 28},
    {"rmean_7_28", 28, 7},
    {"rmean_28_28", 28, 28},
}};

/// Value of a lag feature at position t of `values`, computed the same way as make_lag followed
/// by rolling_mean. Only values[0 .. t - lag] are read.
std::optional<double> lag_feature(std::span<const double> values, std::size_t t, const LagSpec& spec);

struct CalendarFeatures {
    int week = 1;     // ISO-8601 week number
    int quarter = 1;
    int mday = 1;
    int wday = 1;     // ISO weekday, Monday = 1
};

/// Throws InvalidArgument on an invalid date.
CalendarFeatures calendar_features(int year, int month, int day);
/// From "YYYY-MM-DD".
CalendarFeatures calendar_features(std::string_view date);

/// Dense ids in first-appearance order.
class Dictionary {
public:
    /// Id of `value`, assigning the next id if it is new.
    std::uint32_t intern(const std::string& value);
    std::optional<std::uint32_t> find(const std::string& value) const;
    const std::vector<std::string>& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }

private:
    std::vector<std::string> values_;
    std::unordered_map<std::string, std::uint32_t> index_;
};

/// Event names and types from the first event slot of the calendar. Id 0 means "no event";
/// dictionary entry i has id i + 1.
struct EventDictionary {
    Dictionary names;
    Dictionary types;
};

EventDictionary build_event_dictionary(const ingest::CalendarTable& calendar);

/// (event name id, event type id) of a calendar row; (0, 0) without an event.
std::pair<int, int> event_features(const ingest::CalendarRow& row, const EventDictionary& events);

struct FeatureMatrix {
    std::vector<std::string> series_ids;
    std::vector<std::uint32_t> series;  // per row, index into series_ids
    std::vector<int> day;
    std::vector<double> target;
    /// In the fixed order of feature_names().
    std::vector<FeatureColumn> columns;

    // Categorical id dictionaries. Series keys get ids from 0 in first-appearance order.
    Dictionary item_ids;
    Dictionary dept_ids;
    Dictionary cat_ids;
    Dictionary store_ids;
    Dictionary state_ids;
    EventDictionary events;

    std::size_t rows() const { return target.size(); }
    /// Throws NotFound.
    const FeatureColumn& column(std::string_view name) const;
};

/// lag_7, lag_28, rmean_7_7, rmean_28_7, rmean_7_28, rmean_28_28, week, quarter, mday, wday,
/// event_name, event_type, item_id, dept_id, cat_id, store_id, state_id, sell_price.
const std::vector<std::string>& feature_names();

/// One row per merged row, in the same order. Each series' rows must be consecutive days.
/// wday is the calendar file's value (Saturday = 1). `workers` builds series in parallel;
/// 0 uses every hardware thread.
FeatureMatrix build_feature_matrix(const ingest::MergedTable& merged, const ingest::CalendarTable& calendar,
                                   unsigned workers = 1);

/// Joins and builds in one step. DataIntegrityError when a sales day is missing from the
/// calendar.
FeatureMatrix build_feature_matrix(const ingest::LongSales& sales, const ingest::CalendarTable& calendar,
                                   const ingest::PriceTable& prices, unsigned workers = 1);

/// Columnar CSV: series_id, day, target, then feature_names() in order. Missing values are
/// empty fields; numbers use the shortest round-trip representation.
void write_feature_csv(std::ostream& out, const FeatureMatrix& matrix);

}  // namespace retail::features
