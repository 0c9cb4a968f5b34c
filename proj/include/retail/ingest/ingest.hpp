#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "retail/ingest/csv.hpp"
#include "retail/ingest/tables.hpp"

namespace retail::ingest {

/// calendar.csv. Requires date, wm_yr_wk, weekday, wday, month, year, d, event_name_1,
/// event_type_1; event_name_2/event_type_2 and snap_* columns are optional. d labels must run
/// d_1, d_2, ... and dates must increase. Other columns are ignored with a warning.
CalendarTable parse_calendar(const std::string& path);

/// sales_train_*.csv: id, item_id, dept_id, cat_id, store_id, state_id, d_1..d_N. Negative sales
/// raise DataIntegrityError.
SalesWide parse_sales_wide(const std::string& path);

/// sell_prices.csv: store_id, item_id, wm_yr_wk, sell_price. Duplicate (store, item, week) keys
/// raise DataIntegrityError.
PriceTable parse_prices(const std::string& path);

/// Reshape wide to long. When `rows` is given only those wide rows are melted, in that order.
LongSales melt_wide_to_long(const SalesWide& wide, const std::optional<std::vector<std::size_t>>& rows = std::nullopt);

/// Inverse of melt: every series must cover the same consecutive days starting at day 1.
SalesWide pivot_long_to_wide(const LongSales& long_sales);

/// Left joins: calendar on day, then prices on (store_id, item_id, wm_yr_wk). Row order and
/// count are preserved. DataIntegrityError on a day missing from the calendar or duplicate price
/// keys.
MergedTable merge_all(const LongSales& long_sales, const CalendarTable& calendar, const PriceTable& prices);

/// Long CSV with header id,item_id,dept_id,cat_id,store_id,state_id,d,date,wm_yr_wk,event_name_1,
/// event_type_1,sell_price,units. Missing prices are empty fields.
void write_long_csv(std::ostream& out, const MergedTable& merged, const CalendarTable& calendar);

}  // namespace retail::ingest
