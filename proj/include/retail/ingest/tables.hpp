#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "retail/core/column.hpp"

// In-memory forms of the three M5 input files and the reshaped/merged sales table.

namespace retail::ingest {

struct CalendarRow {
    std::string date;  // YYYY-MM-DD
    int wm_yr_wk = 0;
    std::string weekday;
    int wday = 1;  // Saturday = 1
    int month = 1;
    int year = 2000;
    int day = 1;  // n of the "d_<n>" label
    std::string event_name_1;
    std::string event_type_1;
    std::string event_name_2;
    std::string event_type_2;
    std::vector<std::uint8_t> snap;  // one flag per CalendarTable::snap_states
};

struct CalendarTable {
    std::vector<CalendarRow> rows;  // rows[i].day == i + 1
    std::vector<std::string> snap_states;

    /// Throws NotFound if the day is outside the calendar.
    const CalendarRow& at_day(int day) const;
    bool has_day(int day) const { return day >= 1 && static_cast<std::size_t>(day) <= rows.size(); }
};

struct SeriesKey {
    std::string id;
    std::string item_id;
    std::string dept_id;
    std::string cat_id;
    std::string store_id;
    std::string state_id;
};

/// Daily unit sales, one row per series, days d_1..d_days.
struct SalesWide {
    std::vector<SeriesKey> keys;
    int days = 0;
    std::vector<double> sales;  // row-major, keys.size() x days

    std::size_t rows() const { return keys.size(); }
    double at(std::size_t row, int day) const { return sales[row * static_cast<std::size_t>(days) + (day - 1)]; }
    /// Row index of a series id. Throws NotFound.
    std::size_t find(const std::string& id) const;
};

/// Weekly prices with store and item ids interned.
struct PriceTable {
    std::vector<std::string> stores;
    std::vector<std::string> items;
    std::vector<std::uint32_t> store;
    std::vector<std::uint32_t> item;
    std::vector<int> week;
    std::vector<double> price;

    std::size_t size() const { return price.size(); }
    /// Appends a row, interning the ids.
    void add(const std::string& store_id, const std::string& item_id, int wm_yr_wk, double sell_price);

    std::unordered_map<std::string, std::uint32_t> store_index;
    std::unordered_map<std::string, std::uint32_t> item_index;
};

/// Long format: one row per (series, day), ordered by wide row then ascending day. Series keys
/// are shared with the wide table by index.
struct LongSales {
    std::vector<SeriesKey> keys;
    std::vector<std::uint32_t> series;
    std::vector<int> day;
    std::vector<double> units;

    std::size_t size() const { return units.size(); }
};

/// Long sales with the calendar row and the week's price joined on.
struct MergedTable {
    LongSales sales;
    std::vector<std::uint32_t> calendar_row;  // index into CalendarTable::rows
    NullableColumn sell_price;

    std::size_t size() const { return sales.size(); }
};

}  // namespace retail::ingest
