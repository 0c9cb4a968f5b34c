#include "retail/features/features.hpp"

#include <charconv>
#include <chrono>

#include "retail/core/error.hpp"
#include "retail/core/parallel.hpp"
#include "retail/ingest/csv.hpp"
#include "retail/ingest/ingest.hpp"

namespace retail::features {

namespace {

namespace chr = std::chrono;

constexpr std::size_t kCalendarColumns = 4;  // week, quarter, mday, wday

int parse_component(std::string_view text, std::string_view date) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw InvalidArgument("invalid date '" + std::string(date) + "'");
    }
    return v;
}

}  // namespace

NullableColumn make_lag(const TimeSeries& series, int k) {
    if (k < 1 || static_cast<std::size_t>(k) >= series.size()) {
        throw InvalidArgument("make_lag: lag " + std::to_string(k) + " needs a series longer than the lag (length " +
                              std::to_string(series.size()) + ")");
    }
    const std::size_t lag = static_cast<std::size_t>(k);
    NullableColumn out(series.size());
    for (std::size_t t = lag; t < series.size(); ++t) {
        out.set(t, series[t - lag]);
    }
    return out;
}

NullableColumn rolling_mean(const NullableColumn& values, int window) {
    if (window < 1) {
        throw InvalidArgument("rolling_mean: window must be positive");
    }
    const std::size_t w = static_cast<std::size_t>(window);
    NullableColumn out(values.size());
    // Length of the run of present values ending at t.
    std::size_t run = 0;
    for (std::size_t t = 0; t < values.size(); ++t) {
        run = values.has(t) ? run + 1 : 0;
        if (run < w) {
            continue;
        }
        double sum = 0.0;
        for (std::size_t j = t + 1 - w; j <= t; ++j) {
            sum += values.values[j];
        }
        out.set(t, sum / static_cast<double>(w));
    }
    return out;
}

std::optional<double> lag_feature(std::span<const double> values, std::size_t t, const LagSpec& spec) {
    const std::size_t reach = static_cast<std::size_t>(spec.lag) + static_cast<std::size_t>(spec.window) - 1;
    if (t < reach || t >= values.size() + static_cast<std::size_t>(spec.lag)) {
        return std::nullopt;
    }
    const std::size_t last = t - static_cast<std::size_t>(spec.lag);
    double sum = 0.0;
    for (std::size_t j = last + 1 - static_cast<std::size_t>(spec.window); j <= last; ++j) {
        sum += values[j];
    }
    return sum / static_cast<double>(spec.window);
}

CalendarFeatures calendar_features(int year, int month, int day) {
    const chr::year_month_day date{chr::year{year}, chr::month{static_cast<unsigned>(month)},
                                   chr::day{static_cast<unsigned>(day)}};
    if (month < 1 || month > 12 || day < 1 || !date.ok()) {
        throw InvalidArgument("invalid date " + std::to_string(year) + "-" + std::to_string(month) + "-" +
                              std::to_string(day));
    }
    const chr::sys_days days{date};
    const int iso_wday = static_cast<int>(chr::weekday{days}.iso_encoding());
    // The ISO week belongs to the year holding its Thursday.
    const chr::sys_days thursday = days + chr::days{4 - iso_wday};
    const chr::year week_year = chr::year_month_day{thursday}.year();
    const chr::sys_days jan1{week_year / chr::January / 1};

    CalendarFeatures out;
    out.week = static_cast<int>((thursday - jan1).count() / 7) + 1;
    out.quarter = (month + 2) / 3;
    out.mday = day;
    out.wday = iso_wday;
    return out;
}

CalendarFeatures calendar_features(std::string_view date) {
    if (date.size() != 10 || date[4] != '-' || date[7] != '-') {
        throw InvalidArgument("invalid date '" + std::string(date) + "', expected YYYY-MM-DD");
    }
    return calendar_features(parse_component(date.substr(0, 4), date), parse_component(date.substr(5, 2), date),
                             parse_component(date.substr(8, 2), date));
}

std::uint32_t Dictionary::intern(const std::string& value) {
    auto [it, inserted] = index_.try_emplace(value, static_cast<std::uint32_t>(values_.size()));
    if (inserted) {
        values_.push_back(value);
    }
    return it->second;
}

std::optional<std::uint32_t> Dictionary::find(const std::string& value) const {
    auto it = index_.find(value);
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

EventDictionary build_event_dictionary(const ingest::CalendarTable& calendar) {
    EventDictionary events;
    for (const auto& row : calendar.rows) {
        if (!row.event_name_1.empty()) {
            events.names.intern(row.event_name_1);
        }
        if (!row.event_type_1.empty()) {
            events.types.intern(row.event_type_1);
        }
    }
    return events;
}

std::pair<int, int> event_features(const ingest::CalendarRow& row, const EventDictionary& events) {
    auto id = [](const Dictionary& dict, const std::string& value) {
        if (value.empty()) {
            return 0;
        }
        const auto found = dict.find(value);
        return found ? static_cast<int>(*found) + 1 : 0;
    };
    return {id(events.names, row.event_name_1), id(events.types, row.event_type_1)};
}

const std::vector<std::string>& feature_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& spec : kLagFeatures) {
            out.emplace_back(spec.name);
        }
        for (const char* name : {"week", "quarter", "mday", "wday", "event_name", "event_type", "item_id", "dept_id",
                                 "cat_id", "store_id", "state_id", "sell_price"}) {
            out.emplace_back(name);
        }
        return out;
    }();
    return names;
}

const FeatureColumn& FeatureMatrix::column(std::string_view name) const {
    for (const auto& c : columns) {
        if (c.name == name) {
            return c;
        }
    }
    throw NotFound("feature matrix has no column '" + std::string(name) + "'");
}

FeatureMatrix build_feature_matrix(const ingest::MergedTable& merged, const ingest::CalendarTable& calendar,
                                   unsigned workers) {
    const auto& sales = merged.sales;
    const std::size_t n = merged.size();
    if (merged.calendar_row.size() != n || merged.sell_price.size() != n) {
        throw InvalidArgument("build_feature_matrix: merged table columns differ in length");
    }

    // Contiguous row ranges per series, in row order.
    struct Segment {
        std::size_t begin;
        std::size_t end;
    };
    std::vector<Segment> segments;
    std::vector<std::uint8_t> seen(sales.keys.size(), 0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto s = sales.series[i];
        if (i > 0 && sales.series[i - 1] == s) {
            if (sales.day[i] != sales.day[i - 1] + 1) {
                throw DataIntegrityError("feature matrix: series '" + sales.keys[s].id + "' skips from day d_" +
                                         std::to_string(sales.day[i - 1]) + " to d_" + std::to_string(sales.day[i]));
            }
            continue;
        }
        if (seen[s]) {
            throw DataIntegrityError("feature matrix: rows of series '" + sales.keys[s].id + "' are not contiguous");
        }
        seen[s] = 1;
        if (!segments.empty()) {
            segments.back().end = i;
        }
        segments.push_back({i, n});
    }

    FeatureMatrix fm;
    // Dictionaries first, in one ordered pass.
    fm.events = build_event_dictionary(calendar);
    struct KeyIds {
        std::uint32_t item, dept, cat, store, state;
    };
    std::vector<KeyIds> key_ids;
    for (const auto& seg : segments) {
        const auto& key = sales.keys[sales.series[seg.begin]];
        fm.series_ids.push_back(key.id);
        key_ids.push_back({fm.item_ids.intern(key.item_id), fm.dept_ids.intern(key.dept_id),
                           fm.cat_ids.intern(key.cat_id), fm.store_ids.intern(key.store_id),
                           fm.state_ids.intern(key.state_id)});
    }
    // Calendar-derived values once per calendar row.
    std::vector<std::array<int, kCalendarColumns + 2>> per_day(calendar.rows.size());
    for (std::size_t r = 0; r < calendar.rows.size(); ++r) {
        const auto& row = calendar.rows[r];
        const auto cf = calendar_features(row.date);
        const auto [name, type] = event_features(row, fm.events);
        per_day[r] = {cf.week, cf.quarter, cf.mday, row.wday, name, type};
    }

    fm.series.resize(n);
    fm.day.assign(sales.day.begin(), sales.day.end());
    fm.target.assign(sales.units.begin(), sales.units.end());
    const auto& names = feature_names();
    fm.columns.resize(names.size());
    for (std::size_t c = 0; c < names.size(); ++c) {
        fm.columns[c].name = names[c];
        fm.columns[c].values = NullableColumn(n);
        const bool categorical = c >= kLagFeatures.size() + kCalendarColumns && names[c] != "sell_price";
        fm.columns[c].kind = categorical ? ColumnKind::categorical : ColumnKind::numeric;
    }

    constexpr std::size_t kCal = kLagFeatures.size();
    constexpr std::size_t kKeys = kCal + kCalendarColumns + 2;
    parallel_for(segments.size(), workers, [&](std::size_t g) {
        const auto [begin, end] = segments[g];
        const std::span<const double> target(fm.target.data() + begin, end - begin);
        const auto& ids = key_ids[g];
        const double key_values[] = {double(ids.item), double(ids.dept), double(ids.cat), double(ids.store),
                                     double(ids.state)};
        for (std::size_t i = begin; i < end; ++i) {
            fm.series[i] = static_cast<std::uint32_t>(g);
            for (std::size_t f = 0; f < kLagFeatures.size(); ++f) {
                fm.columns[f].values.set(i, lag_feature(target, i - begin, kLagFeatures[f]));
            }
            const auto& cal = per_day[merged.calendar_row[i]];
            for (std::size_t c = 0; c < cal.size(); ++c) {
                fm.columns[kCal + c].values.set(i, static_cast<double>(cal[c]));
            }
            for (std::size_t c = 0; c < 5; ++c) {
                fm.columns[kKeys + c].values.set(i, key_values[c]);
            }
            fm.columns[kKeys + 5].values.set(i, merged.sell_price.get(i));
        }
    });
    return fm;
}

FeatureMatrix build_feature_matrix(const ingest::LongSales& sales, const ingest::CalendarTable& calendar,
                                   const ingest::PriceTable& prices, unsigned workers) {
    return build_feature_matrix(ingest::merge_all(sales, calendar, prices), calendar, workers);
}

void write_feature_csv(std::ostream& out, const FeatureMatrix& matrix) {
    out << "series_id,day,target";
    for (const auto& c : matrix.columns) {
        out << ',' << c.name;
    }
    out << '\n';
    char number[64];
    auto write_number = [&](double v) {
        const auto r = std::to_chars(number, number + sizeof number, v);
        out.write(number, r.ptr - number);
    };
    for (std::size_t i = 0; i < matrix.rows(); ++i) {
        out << ingest::csv_escape(matrix.series_ids[matrix.series[i]]) << ',' << matrix.day[i] << ',';
        write_number(matrix.target[i]);
        for (const auto& c : matrix.columns) {
            out << ',';
            if (c.values.has(i)) {
                write_number(c.values.values[i]);
            }
        }
        out << '\n';
    }
}

}  // namespace retail::features
