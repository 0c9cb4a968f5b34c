#pragma once

// The 40-day single-series fixture with its hand-computed feature table.

#include <chrono>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "retail/ingest/tables.hpp"

namespace retail::testing {

inline const double kNA = std::numeric_limits<double>::quiet_NaN();

struct ExpectedRow {
    const char* date;
    double target;
    double lags[6];  // lag_7, lag_28, rmean_7_7, rmean_28_7, rmean_7_28, rmean_28_28
    int week;
    int quarter;
    int mday;
};

// Computed independently (plain list slicing and datetime.isocalendar) for the series
// y_t = (7t mod 11) + 3[t mod 7 == 0], t = 1..40, starting Saturday 2016-02-20.
inline const ExpectedRow kExpected[] = {
    {"2016-02-20", 7.0, {kNA, kNA, kNA, kNA, kNA, kNA}, 7, 1, 20},
    {"2016-02-21", 3.0, {kNA, kNA, kNA, kNA, kNA, kNA}, 7, 1, 21},
    {"2016-02-22", 10.0, {kNA, kNA, kNA, kNA, kNA, kNA}, 8, 1, 22},
    {"2016-02-23", 6.0, {kNA, kNA, kNA, kNA, kNA, kNA}, 8, 1, 23},
    {"2016-02-24", 2.0, {kNA, kNA, kNA, kNA, kNA, kNA}, 8, 1, 24},
    {"2016-02-25", 9.0, {kNA, kNA, kNA, kNA, kNA, kNA}, 8, 1, 25},
    {"2016-02-26", 8.0, {kNA, kNA, kNA, kNA, kNA, kNA}, 8, 1, 26},
    {"2016-02-27", 1.0, {7.0, kNA, kNA, kNA, kNA, kNA}, 8, 1, 27},
    {"2016-02-28", 8.0, {3.0, kNA, kNA, kNA, kNA, kNA}, 8, 1, 28},
    {"2016-02-29", 4.0, {10.0, kNA, kNA, kNA, kNA, kNA}, 9, 1, 29},
    {"2016-03-01", 0.0, {6.0, kNA, kNA, kNA, kNA, kNA}, 9, 1, 1},
    {"2016-03-02", 7.0, {2.0, kNA, kNA, kNA, kNA, kNA}, 9, 1, 2},
    {"2016-03-03", 3.0, {9.0, kNA, kNA, kNA, kNA, kNA}, 9, 1, 3},
    {"2016-03-04", 13.0, {8.0, kNA, 6.428571428571429, kNA, kNA, kNA}, 9, 1, 4},
    {"2016-03-05", 6.0, {1.0, kNA, 5.571428571428571, kNA, kNA, kNA}, 9, 1, 5},
    {"2016-03-06", 2.0, {8.0, kNA, 6.285714285714286, kNA, kNA, kNA}, 9, 1, 6},
    {"2016-03-07", 9.0, {4.0, kNA, 5.428571428571429, kNA, kNA, kNA}, 10, 1, 7},
    {"2016-03-08", 5.0, {0.0, kNA, 4.571428571428571, kNA, kNA, kNA}, 10, 1, 8},
    {"2016-03-09", 1.0, {7.0, kNA, 5.285714285714286, kNA, kNA, kNA}, 10, 1, 9},
    {"2016-03-10", 8.0, {3.0, kNA, 4.428571428571429, kNA, kNA, kNA}, 10, 1, 10},
    {"2016-03-11", 7.0, {13.0, kNA, 5.142857142857143, kNA, kNA, kNA}, 10, 1, 11},
    {"2016-03-12", 0.0, {6.0, kNA, 5.857142857142857, kNA, kNA, kNA}, 10, 1, 12},
    {"2016-03-13", 7.0, {2.0, kNA, 5.0, kNA, kNA, kNA}, 10, 1, 13},
    {"2016-03-14", 3.0, {9.0, kNA, 5.714285714285714, kNA, kNA, kNA}, 11, 1, 14},
    {"2016-03-15", 10.0, {5.0, kNA, 6.428571428571429, kNA, kNA, kNA}, 11, 1, 15},
    {"2016-03-16", 6.0, {1.0, kNA, 5.571428571428571, kNA, kNA, kNA}, 11, 1, 16},
    {"2016-03-17", 2.0, {8.0, kNA, 6.285714285714286, kNA, kNA, kNA}, 11, 1, 17},
    {"2016-03-18", 12.0, {7.0, kNA, 5.428571428571429, kNA, kNA, kNA}, 11, 1, 18},
    {"2016-03-19", 5.0, {0.0, 7.0, 4.571428571428571, kNA, kNA, kNA}, 11, 1, 19},
    {"2016-03-20", 1.0, {7.0, 3.0, 5.285714285714286, kNA, kNA, kNA}, 11, 1, 20},
    {"2016-03-21", 8.0, {3.0, 10.0, 4.428571428571429, kNA, kNA, kNA}, 12, 1, 21},
    {"2016-03-22", 4.0, {10.0, 6.0, 5.142857142857143, kNA, kNA, kNA}, 12, 1, 22},
    {"2016-03-23", 0.0, {6.0, 2.0, 5.857142857142857, kNA, kNA, kNA}, 12, 1, 23},
    {"2016-03-24", 7.0, {2.0, 9.0, 5.0, kNA, kNA, kNA}, 12, 1, 24},
    {"2016-03-25", 6.0, {12.0, 8.0, 5.714285714285714, 5.678571428571429, 6.428571428571429, kNA}, 12, 1, 25},
    {"2016-03-26", 10.0, {5.0, 1.0, 6.428571428571429, 5.607142857142857, 5.571428571428571, kNA}, 12, 1, 26},
    {"2016-03-27", 6.0, {1.0, 8.0, 5.571428571428571, 5.535714285714286, 6.285714285714286, kNA}, 12, 1, 27},
    {"2016-03-28", 2.0, {8.0, 4.0, 6.285714285714286, 5.464285714285714, 5.428571428571429, kNA}, 13, 1, 28},
    {"2016-03-29", 9.0, {4.0, 0.0, 5.428571428571429, 5.392857142857143, 4.571428571428571, kNA}, 13, 1, 29},
    {"2016-03-30", 5.0, {0.0, 7.0, 4.571428571428571, 5.321428571428571, 5.285714285714286, kNA}, 13, 1, 30},
};

inline ingest::CalendarTable fixture_calendar(std::size_t days) {
    static const char* const names[] = {"Saturday", "Sunday", "Monday", "Tuesday", "Wednesday", "Thursday", "Friday"};
    const std::chrono::year_month_day origin{std::chrono::year{2016}, std::chrono::month{2}, std::chrono::day{20}};
    ingest::CalendarTable cal;
    for (std::size_t i = 0; i < days; ++i) {
        ingest::CalendarRow row;
        const std::chrono::year_month_day date{std::chrono::sys_days{origin} + std::chrono::days{i}};
        char text[16];
        std::snprintf(text, sizeof text, "%04d-%02u-%02u", int(date.year()), unsigned(date.month()),
                      unsigned(date.day()));
        row.date = text;
        row.day = static_cast<int>(i) + 1;
        row.wday = static_cast<int>(i % 7) + 1;
        row.weekday = names[i % 7];
        row.wm_yr_wk = 11604 + static_cast<int>(i / 7);
        if (row.day == 3 || row.day == 10) {
            row.event_name_1 = "SuperBowl";
            row.event_type_1 = "Sporting";
        } else if (row.day == 5) {
            row.event_name_1 = "ValentinesDay";
            row.event_type_1 = "Cultural";
        }
        cal.rows.push_back(row);
    }
    return cal;
}

inline ingest::SeriesKey key(const std::string& item, const std::string& store) {
    return {item + "_" + store + "_evaluation", item, "DEPT_1", "CAT", store, "CA"};
}

inline ingest::LongSales long_sales(const std::vector<std::vector<double>>& series) {
    ingest::LongSales out;
    for (std::size_t s = 0; s < series.size(); ++s) {
        out.keys.push_back(key("ITEM_" + std::to_string(s), "CA_1"));
        for (std::size_t t = 0; t < series[s].size(); ++t) {
            out.series.push_back(static_cast<std::uint32_t>(s));
            out.day.push_back(static_cast<int>(t) + 1);
            out.units.push_back(series[s][t]);
        }
    }
    return out;
}

// Priced from the second week on.
inline ingest::PriceTable fixture_prices(std::size_t series, std::size_t weeks) {
    ingest::PriceTable prices;
    for (std::size_t s = 0; s < series; ++s) {
        for (std::size_t w = 1; w < weeks; ++w) {
            prices.add("CA_1", "ITEM_" + std::to_string(s), 11604 + static_cast<int>(w), 1.5 + 0.25 * double(w));
        }
    }
    return prices;
}

}  // namespace retail::testing
