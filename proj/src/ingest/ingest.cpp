#include "retail/ingest/ingest.hpp"

#include <spdlog/spdlog.h>

#include <charconv>
#include <chrono>
#include <map>
#include <unordered_map>

#include "retail/core/error.hpp"

namespace retail::ingest {

namespace {

bool blank(const std::vector<std::string>& fields) {
    return fields.size() == 1 && fields[0].empty();
}

// Column positions by name from a header record.
class Header {
public:
    Header(const std::vector<std::string>& fields, const CsvReader& reader) : file_(reader.path()) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (!index_.emplace(fields[i], i).second) {
                throw ParseError(file_, reader.line(), "duplicate column '" + fields[i] + "'");
            }
        }
        width_ = fields.size();
    }

    std::size_t require(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) {
            throw ParseError(file_, 1, "missing required column '" + name + "'");
        }
        return it->second;
    }

    std::optional<std::size_t> optional(const std::string& name) const {
        auto it = index_.find(name);
        return it == index_.end() ? std::nullopt : std::optional(it->second);
    }

    std::size_t width() const { return width_; }

private:
    std::string file_;
    std::map<std::string, std::size_t> index_;
    std::size_t width_ = 0;
};

void check_width(const std::vector<std::string>& fields, const Header& header, const CsvReader& reader) {
    if (fields.size() != header.width()) {
        throw ParseError(reader.path(), reader.line(),
                         "expected " + std::to_string(header.width()) + " fields, found " + std::to_string(fields.size()));
    }
}

// "d_<n>" -> n, or 0 when the label has another form.
int day_label(const std::string& label) {
    if (label.size() < 3 || label[0] != 'd' || label[1] != '_') {
        return 0;
    }
    int n = 0;
    for (std::size_t i = 2; i < label.size(); ++i) {
        if (label[i] < '0' || label[i] > '9') {
            return 0;
        }
        n = n * 10 + (label[i] - '0');
        if (n > 10'000'000) {
            return 0;
        }
    }
    return n;
}

bool valid_date(const std::string& text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        return false;
    }
    for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9}) {
        if (text[i] < '0' || text[i] > '9') {
            return false;
        }
    }
    const int y = std::stoi(text.substr(0, 4));
    const unsigned m = static_cast<unsigned>(std::stoi(text.substr(5, 2)));
    const unsigned d = static_cast<unsigned>(std::stoi(text.substr(8, 2)));
    return std::chrono::year_month_day{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}}.ok();
}

std::uint64_t price_key(std::uint32_t store, std::uint32_t item, int week) {
    return (static_cast<std::uint64_t>(store) << 44) | (static_cast<std::uint64_t>(item) << 24) |
           static_cast<std::uint64_t>(static_cast<std::uint32_t>(week) & 0xFFFFFFu);
}

}  // namespace

const CalendarRow& CalendarTable::at_day(int day) const {
    if (!has_day(day)) {
        throw NotFound("day " + std::to_string(day) + " is not in the calendar");
    }
    return rows[static_cast<std::size_t>(day - 1)];
}

std::size_t SalesWide::find(const std::string& id) const {
    for (std::size_t r = 0; r < keys.size(); ++r) {
        if (keys[r].id == id) {
            return r;
        }
    }
    throw NotFound("series '" + id + "' not found");
}

void PriceTable::add(const std::string& store_id, const std::string& item_id, int wm_yr_wk, double sell_price) {
    auto intern = [](std::unordered_map<std::string, std::uint32_t>& index, std::vector<std::string>& names,
                     const std::string& name) {
        auto [it, inserted] = index.try_emplace(name, static_cast<std::uint32_t>(names.size()));
        if (inserted) {
            names.push_back(name);
        }
        return it->second;
    };
    store.push_back(intern(store_index, stores, store_id));
    item.push_back(intern(item_index, items, item_id));
    week.push_back(wm_yr_wk);
    price.push_back(sell_price);
}

CalendarTable parse_calendar(const std::string& path) {
    CsvReader reader(path);
    std::vector<std::string> f;
    if (!reader.next(f)) {
        throw ParseError(path, 1, "empty file");
    }
    const Header header(f, reader);
    const std::size_t c_date = header.require("date");
    const std::size_t c_week = header.require("wm_yr_wk");
    const std::size_t c_weekday = header.require("weekday");
    const std::size_t c_wday = header.require("wday");
    const std::size_t c_month = header.require("month");
    const std::size_t c_year = header.require("year");
    const std::size_t c_d = header.require("d");
    const std::size_t c_en1 = header.require("event_name_1");
    const std::size_t c_et1 = header.require("event_type_1");
    const auto c_en2 = header.optional("event_name_2");
    const auto c_et2 = header.optional("event_type_2");

    CalendarTable table;
    std::vector<std::size_t> snap_cols;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const std::string& name = f[i];
        if (name.rfind("snap_", 0) == 0) {
            table.snap_states.push_back(name.substr(5));
            snap_cols.push_back(i);
        } else if (i != c_date && i != c_week && i != c_weekday && i != c_wday && i != c_month && i != c_year &&
                   i != c_d && i != c_en1 && i != c_et1 && (!c_en2 || i != *c_en2) && (!c_et2 || i != *c_et2)) {
            spdlog::warn("{}: ignoring unknown column '{}'", path, name);
        }
    }

    while (reader.next(f)) {
        if (blank(f)) {
            continue;
        }
        check_width(f, header, reader);
        const std::size_t line = reader.line();
        CalendarRow row;
        row.date = f[c_date];
        if (!valid_date(row.date)) {
            throw ParseError(path, line, "malformed date '" + row.date + "'");
        }
        if (!table.rows.empty() && !(row.date > table.rows.back().date)) {
            throw ParseError(path, line, "dates must be strictly increasing");
        }
        row.wm_yr_wk = parse_int(f[c_week], path, line, "wm_yr_wk");
        row.weekday = f[c_weekday];
        row.wday = parse_int(f[c_wday], path, line, "wday");
        if (row.wday < 1 || row.wday > 7) {
            throw ParseError(path, line, "wday outside 1..7");
        }
        row.month = parse_int(f[c_month], path, line, "month");
        row.year = parse_int(f[c_year], path, line, "year");
        row.day = day_label(f[c_d]);
        if (row.day != static_cast<int>(table.rows.size()) + 1) {
            throw ParseError(path, line,
                             "expected day label d_" + std::to_string(table.rows.size() + 1) + ", found '" + f[c_d] + "'");
        }
        row.event_name_1 = f[c_en1];
        row.event_type_1 = f[c_et1];
        if (c_en2) {
            row.event_name_2 = f[*c_en2];
        }
        if (c_et2) {
            row.event_type_2 = f[*c_et2];
        }
        for (std::size_t c : snap_cols) {
            const int flag = parse_int(f[c], path, line, "snap");
            if (flag != 0 && flag != 1) {
                throw ParseError(path, line, "snap flag must be 0 or 1");
            }
            row.snap.push_back(static_cast<std::uint8_t>(flag));
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

SalesWide parse_sales_wide(const std::string& path) {
    CsvReader reader(path);
    std::vector<std::string> f;
    if (!reader.next(f)) {
        throw ParseError(path, 1, "empty file");
    }
    static const char* const kKeyColumns[] = {"id", "item_id", "dept_id", "cat_id", "store_id", "state_id"};
    for (std::size_t i = 0; i < 6; ++i) {
        if (i >= f.size() || f[i] != kKeyColumns[i]) {
            throw ParseError(path, 1, std::string("expected column '") + kKeyColumns[i] + "' at position " +
                                          std::to_string(i + 1));
        }
    }
    SalesWide wide;
    for (std::size_t i = 6; i < f.size(); ++i) {
        if (day_label(f[i]) != static_cast<int>(i) - 5) {
            throw ParseError(path, 1, "expected day column d_" + std::to_string(i - 5) + ", found '" + f[i] + "'");
        }
    }
    wide.days = static_cast<int>(f.size()) - 6;
    if (wide.days < 1) {
        throw ParseError(path, 1, "no day columns");
    }
    const std::size_t width = f.size();
    while (reader.next(f)) {
        if (blank(f)) {
            continue;
        }
        const std::size_t line = reader.line();
        if (f.size() != width) {
            throw ParseError(path, line, "expected " + std::to_string(width) + " fields, found " + std::to_string(f.size()));
        }
        wide.keys.push_back({f[0], f[1], f[2], f[3], f[4], f[5]});
        for (std::size_t i = 6; i < width; ++i) {
            const double v = parse_double(f[i], path, line, "d_" + std::to_string(i - 5));
            if (v < 0.0) {
                throw DataIntegrityError(path + ":" + std::to_string(line) + ": negative sales in d_" +
                                         std::to_string(i - 5) + " for '" + f[0] + "'");
            }
            wide.sales.push_back(v);
        }
    }
    return wide;
}

PriceTable parse_prices(const std::string& path) {
    CsvReader reader(path);
    std::vector<std::string> f;
    if (!reader.next(f)) {
        throw ParseError(path, 1, "empty file");
    }
    const Header header(f, reader);
    const std::size_t c_store = header.require("store_id");
    const std::size_t c_item = header.require("item_id");
    const std::size_t c_week = header.require("wm_yr_wk");
    const std::size_t c_price = header.require("sell_price");
    if (header.width() > 4) {
        spdlog::warn("{}: ignoring {} unknown column(s)", path, header.width() - 4);
    }
    PriceTable table;
    std::unordered_map<std::uint64_t, std::size_t> seen;
    while (reader.next(f)) {
        if (blank(f)) {
            continue;
        }
        check_width(f, header, reader);
        const std::size_t line = reader.line();
        const int week = parse_int(f[c_week], path, line, "wm_yr_wk");
        const double price = parse_double(f[c_price], path, line, "sell_price");
        if (!(price > 0.0)) {
            throw DataIntegrityError(path + ":" + std::to_string(line) + ": sell_price must be positive");
        }
        table.add(f[c_store], f[c_item], week, price);
        const std::size_t r = table.size() - 1;
        if (!seen.emplace(price_key(table.store[r], table.item[r], week), line).second) {
            throw DataIntegrityError(path + ":" + std::to_string(line) + ": duplicate price for store '" + f[c_store] +
                                     "', item '" + f[c_item] + "', week " + std::to_string(week));
        }
    }
    return table;
}

LongSales melt_wide_to_long(const SalesWide& wide, const std::optional<std::vector<std::size_t>>& rows) {
    std::vector<std::size_t> order;
    if (rows) {
        order = *rows;
    } else {
        order.resize(wide.rows());
        for (std::size_t r = 0; r < order.size(); ++r) {
            order[r] = r;
        }
    }
    LongSales out;
    const std::size_t days = static_cast<std::size_t>(wide.days);
    out.series.reserve(order.size() * days);
    out.day.reserve(order.size() * days);
    out.units.reserve(order.size() * days);
    for (std::size_t s = 0; s < order.size(); ++s) {
        const std::size_t r = order[s];
        if (r >= wide.rows()) {
            throw InvalidArgument("melt: row " + std::to_string(r) + " out of range");
        }
        out.keys.push_back(wide.keys[r]);
        for (int d = 1; d <= wide.days; ++d) {
            out.series.push_back(static_cast<std::uint32_t>(s));
            out.day.push_back(d);
            out.units.push_back(wide.at(r, d));
        }
    }
    return out;
}

SalesWide pivot_long_to_wide(const LongSales& long_sales) {
    SalesWide wide;
    wide.keys = long_sales.keys;
    const std::size_t n_series = wide.keys.size();
    if (n_series == 0) {
        return wide;
    }
    if (long_sales.size() % n_series != 0) {
        throw DataIntegrityError("pivot: series have different lengths");
    }
    wide.days = static_cast<int>(long_sales.size() / n_series);
    wide.sales.assign(long_sales.size(), 0.0);
    std::vector<std::size_t> filled(n_series, 0);
    for (std::size_t i = 0; i < long_sales.size(); ++i) {
        const std::size_t s = long_sales.series[i];
        const int d = long_sales.day[i];
        if (s >= n_series || d < 1 || d > wide.days) {
            throw DataIntegrityError("pivot: row " + std::to_string(i) + " outside the day range");
        }
        wide.sales[s * static_cast<std::size_t>(wide.days) + static_cast<std::size_t>(d - 1)] = long_sales.units[i];
        ++filled[s];
    }
    for (std::size_t s = 0; s < n_series; ++s) {
        if (filled[s] != static_cast<std::size_t>(wide.days)) {
            throw DataIntegrityError("pivot: series '" + wide.keys[s].id + "' does not cover every day once");
        }
    }
    return wide;
}

MergedTable merge_all(const LongSales& long_sales, const CalendarTable& calendar, const PriceTable& prices) {
    std::unordered_map<std::uint64_t, std::size_t> price_rows;
    price_rows.reserve(prices.size());
    for (std::size_t r = 0; r < prices.size(); ++r) {
        if (!price_rows.emplace(price_key(prices.store[r], prices.item[r], prices.week[r]), r).second) {
            throw DataIntegrityError("merge: duplicate price key for store '" + prices.stores[prices.store[r]] +
                                     "', item '" + prices.items[prices.item[r]] + "', week " +
                                     std::to_string(prices.week[r]) + " would fan out rows");
        }
    }
    for (std::size_t i = 0; i < calendar.rows.size(); ++i) {
        if (calendar.rows[i].day != static_cast<int>(i) + 1) {
            throw DataIntegrityError("merge: calendar day labels are not consecutive");
        }
    }

    MergedTable merged;
    merged.sales = long_sales;
    merged.calendar_row.resize(long_sales.size());
    merged.sell_price = NullableColumn(long_sales.size());
    // Per series: interned store/item ids (absent from the price file -> no prices at all).
    std::vector<std::optional<std::pair<std::uint32_t, std::uint32_t>>> series_ids(long_sales.keys.size());
    for (std::size_t s = 0; s < long_sales.keys.size(); ++s) {
        auto st = prices.store_index.find(long_sales.keys[s].store_id);
        auto it = prices.item_index.find(long_sales.keys[s].item_id);
        if (st != prices.store_index.end() && it != prices.item_index.end()) {
            series_ids[s] = std::pair{st->second, it->second};
        }
    }
    for (std::size_t i = 0; i < long_sales.size(); ++i) {
        const int day = long_sales.day[i];
        if (!calendar.has_day(day)) {
            throw DataIntegrityError("merge: day d_" + std::to_string(day) + " is not in the calendar");
        }
        merged.calendar_row[i] = static_cast<std::uint32_t>(day - 1);
        const auto& ids = series_ids[long_sales.series[i]];
        if (ids) {
            const int week = calendar.rows[static_cast<std::size_t>(day - 1)].wm_yr_wk;
            auto hit = price_rows.find(price_key(ids->first, ids->second, week));
            if (hit != price_rows.end()) {
                merged.sell_price.set(i, prices.price[hit->second]);
            }
        }
    }
    return merged;
}

void write_long_csv(std::ostream& out, const MergedTable& merged, const CalendarTable& calendar) {
    out << "id,item_id,dept_id,cat_id,store_id,state_id,d,date,wm_yr_wk,event_name_1,event_type_1,sell_price,units\n";
    char number[64];
    for (std::size_t i = 0; i < merged.size(); ++i) {
        const auto& key = merged.sales.keys[merged.sales.series[i]];
        const auto& cal = calendar.rows[merged.calendar_row[i]];
        out << csv_escape(key.id) << ',' << csv_escape(key.item_id) << ',' << csv_escape(key.dept_id) << ','
            << csv_escape(key.cat_id) << ',' << csv_escape(key.store_id) << ',' << csv_escape(key.state_id) << ",d_"
            << merged.sales.day[i] << ',' << cal.date << ',' << cal.wm_yr_wk << ',' << csv_escape(cal.event_name_1)
            << ',' << csv_escape(cal.event_type_1) << ',';
        if (merged.sell_price.has(i)) {
            const auto r = std::to_chars(number, number + sizeof number, merged.sell_price.values[i]);
            out.write(number, r.ptr - number);
        }
        out << ',';
        const auto r = std::to_chars(number, number + sizeof number, merged.sales.units[i]);
        out.write(number, r.ptr - number);
        out << '\n';
    }
}

}  // namespace retail::ingest
