#include <cmath>
#include <filesystem>
#include <fstream>

#include "json.hpp"

#include "retail/bench/bench.hpp"
#include "retail/core/error.hpp"
#include "retail/ingest/csv.hpp"
#include "retail/ingest/ingest.hpp"

namespace retail::bench {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw NotFound("cannot write " + path.string());
    }
    out.precision(17);
    return out;
}

}  // namespace

Dataset load_dataset(const std::string& calendar_path, const std::string& sales_path,
                     const std::string& prices_path) {
    Dataset d;
    d.calendar = ingest::parse_calendar(calendar_path);
    d.sales = ingest::parse_sales_wide(sales_path);
    d.prices = ingest::parse_prices(prices_path);
    return d;
}

ingest::MergedTable merge_dataset(const Dataset& data, const std::optional<std::vector<std::size_t>>& rows) {
    return ingest::merge_all(ingest::melt_wide_to_long(data.sales, rows), data.calendar, data.prices);
}

std::optional<EventPriceStats> eda_event_price_stats(const ingest::MergedTable& merged,
                                                     const ingest::CalendarTable& calendar) {
    struct Sums {
        double event = 0.0;
        std::size_t event_n = 0;
        double normal = 0.0;
        std::size_t normal_n = 0;
    };
    const auto& sales = merged.sales;
    std::vector<Sums> per_series(sales.keys.size());
    bool any_event = false;
    for (std::size_t i = 0; i < merged.size(); ++i) {
        if (!merged.sell_price.has(i)) {
            continue;
        }
        const auto& row = calendar.rows[merged.calendar_row[i]];
        auto& s = per_series[sales.series[i]];
        if (!row.event_name_1.empty()) {
            any_event = true;
            s.event += merged.sell_price.values[i];
            ++s.event_n;
        } else {
            s.normal += merged.sell_price.values[i];
            ++s.normal_n;
        }
    }
    if (!any_event) {
        return std::nullopt;
    }
    EventPriceStats out;
    for (std::size_t k = 0; k < per_series.size(); ++k) {
        const auto& s = per_series[k];
        if (s.event_n == 0 || s.normal_n == 0) {
            continue;
        }
        const double event = s.event / static_cast<double>(s.event_n);
        const double normal = s.normal / static_cast<double>(s.normal_n);
        ++out.products;
        out.mean_event_price += event;
        out.mean_normal_price += normal;
        if (event < normal) {
            ++out.discounted;
            ++out.discounted_by_dept[sales.keys[k].dept_id];
        } else if (event > normal) {
            ++out.increased;
        }
    }
    if (out.products > 0) {
        const double n = static_cast<double>(out.products);
        out.fraction_discounted = static_cast<double>(out.discounted) / n;
        out.fraction_increased = static_cast<double>(out.increased) / n;
        out.mean_event_price /= n;
        out.mean_normal_price /= n;
    }
    return out;
}

SalesSummaries eda_sales_summaries(const ingest::MergedTable& merged, const ingest::CalendarTable& calendar) {
    SalesSummaries out;
    const auto& sales = merged.sales;
    std::vector<std::string> weekday_names(7);
    std::vector<double> weekday_units(7, 0.0);
    std::vector<bool> weekday_seen(7, false);
    struct Moments {
        double sum = 0.0;
        double sq = 0.0;
        std::size_t n = 0;
    };
    std::map<std::pair<std::string, int>, Moments> prices;

    for (std::size_t i = 0; i < merged.size(); ++i) {
        const auto& key = sales.keys[sales.series[i]];
        const auto& row = calendar.rows[merged.calendar_row[i]];
        const double units = sales.units[i];
        out.units_by_category[key.cat_id] += units;
        if (row.wday < 1 || row.wday > 7) {
            throw DataIntegrityError("calendar wday out of range on " + row.date);
        }
        const auto w = static_cast<std::size_t>(row.wday - 1);
        weekday_names[w] = row.weekday;
        weekday_units[w] += units;
        weekday_seen[w] = true;
        if (merged.sell_price.has(i)) {
            auto& m = prices[{key.cat_id, row.wm_yr_wk}];
            const double p = merged.sell_price.values[i];
            m.sum += p;
            m.sq += p * p;
            ++m.n;
        }
    }
    for (std::size_t w = 0; w < 7; ++w) {
        if (weekday_seen[w]) {
            out.units_by_weekday.emplace_back(weekday_names[w], weekday_units[w]);
        }
    }
    for (const auto& [key, m] : prices) {
        PricePoint p;
        p.category = key.first;
        p.wm_yr_wk = key.second;
        p.count = m.n;
        p.mean = m.sum / static_cast<double>(m.n);
        p.sd = std::sqrt(std::max(0.0, m.sq / static_cast<double>(m.n) - p.mean * p.mean));
        out.price_over_time.push_back(p);
    }
    return out;
}

std::string eda_to_json(const std::optional<EventPriceStats>& events, const SalesSummaries& summaries) {
    nlohmann::ordered_json doc;
    if (events) {
        auto& e = doc["event_prices"];
        e["products"] = events->products;
        e["fraction_discounted"] = events->fraction_discounted;
        e["fraction_increased"] = events->fraction_increased;
        e["mean_normal_price"] = events->mean_normal_price;
        e["mean_event_price"] = events->mean_event_price;
        e["discounted_by_dept"] = events->discounted_by_dept;
    } else {
        doc["event_prices"] = nullptr;
    }
    doc["units_by_category"] = summaries.units_by_category;
    auto& weekdays = doc["units_by_weekday"] = nlohmann::ordered_json::array();
    for (const auto& [name, units] : summaries.units_by_weekday) {
        weekdays.push_back({{"weekday", name}, {"units", units}});
    }
    auto& band = doc["price_over_time"] = nlohmann::ordered_json::array();
    for (const auto& p : summaries.price_over_time) {
        band.push_back({{"category", p.category}, {"wm_yr_wk", p.wm_yr_wk}, {"mean", p.mean}, {"sd", p.sd},
                        {"count", p.count}});
    }
    return doc.dump(2);
}

void write_eda(const std::string& dir, const std::optional<EventPriceStats>& events,
               const SalesSummaries& summaries) {
    const std::filesystem::path root(dir);
    std::filesystem::create_directories(root);
    {
        auto out = open_out(root / "eda_event_prices.csv");
        out << "products,discounted,increased,fraction_discounted,fraction_increased,mean_normal_price,"
               "mean_event_price\n";
        if (events) {
            out << events->products << ',' << events->discounted << ',' << events->increased << ','
                << events->fraction_discounted << ',' << events->fraction_increased << ','
                << events->mean_normal_price << ',' << events->mean_event_price << '\n';
        }
    }
    {
        auto out = open_out(root / "eda_units_by_category.csv");
        out << "category,units\n";
        for (const auto& [cat, units] : summaries.units_by_category) {
            out << ingest::csv_escape(cat) << ',' << units << '\n';
        }
    }
    {
        auto out = open_out(root / "eda_units_by_weekday.csv");
        out << "weekday,units\n";
        for (const auto& [name, units] : summaries.units_by_weekday) {
            out << ingest::csv_escape(name) << ',' << units << '\n';
        }
    }
    {
        auto out = open_out(root / "eda_price_over_time.csv");
        out << "category,wm_yr_wk,mean,sd,count\n";
        for (const auto& p : summaries.price_over_time) {
            out << ingest::csv_escape(p.category) << ',' << p.wm_yr_wk << ',' << p.mean << ',' << p.sd << ','
                << p.count << '\n';
        }
    }
    auto out = open_out(root / "eda.json");
    out << eda_to_json(events, summaries) << '\n';
}

}  // namespace retail::bench
