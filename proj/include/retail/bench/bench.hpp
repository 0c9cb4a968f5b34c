#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "retail/core/timeseries.hpp"
#include "retail/gbdt/model.hpp"
#include "retail/ingest/tables.hpp"

namespace retail::bench {

enum class Model { arima, additive, gbdt };

std::string_view model_name(Model model);
/// Throws InvalidArgument for anything but "arima", "additive" or "gbdt".
Model parse_model(std::string_view name);

struct BenchmarkConfig {
    int horizon = 28;
    int n_per_category = 100;
    std::vector<std::string> categories{"FOODS", "HOBBIES", "HOUSEHOLD"};
    std::vector<Model> models{Model::arima, Model::additive, Model::gbdt};
    std::uint64_t seed = 42;
    bool clamp_negative = true;
    std::string calendar_path = "calendar.csv";
    std::string sales_path = "sales_train_validation.csv";
    std::string prices_path = "sell_prices.csv";
    std::string output_dir = "bench_out";
    /// Concurrent per-product fits; 0 uses every hardware thread.
    unsigned workers = 0;
    gbdt::GbdtParams gbdt;

    /// Throws InvalidArgument.
    void validate() const;
};

/// `key = value` lines; '#' starts a comment. Keys: horizon, n_per_category, categories and
/// models (comma lists), seed, clamp_negative, calendar, sales, prices, output_dir, workers, and
/// gbdt.<field> for the boosting parameters. Relative paths are taken relative to `base_dir`.
/// Throws ParseError on unknown keys or bad values.
BenchmarkConfig parse_config(std::istream& in, const std::string& source, const std::string& base_dir = "");
/// Throws NotFound if the file cannot be opened.
BenchmarkConfig load_config(const std::string& path);

struct Dataset {
    ingest::CalendarTable calendar;
    ingest::SalesWide sales;
    ingest::PriceTable prices;
};

Dataset load_dataset(const std::string& calendar_path, const std::string& sales_path, const std::string& prices_path);

/// Merged long table over every series (or only `rows` of the wide table).
ingest::MergedTable merge_dataset(const Dataset& data, const std::optional<std::vector<std::size_t>>& rows = std::nullopt);

// ---- exploratory statistics ----

struct EventPriceStats {
    /// Products with a price on at least one event day and one non-event day.
    std::size_t products = 0;
    std::size_t discounted = 0;
    std::size_t increased = 0;
    double fraction_discounted = 0.0;
    double fraction_increased = 0.0;
    /// Means over those products of their per-product mean prices.
    double mean_normal_price = 0.0;
    double mean_event_price = 0.0;
    std::map<std::string, std::size_t> discounted_by_dept;
};

/// Per product, mean price on event days vs non-event days; ties count as neither. Empty when no
/// priced row falls on an event day.
std::optional<EventPriceStats> eda_event_price_stats(const ingest::MergedTable& merged,
                                                     const ingest::CalendarTable& calendar);

struct PricePoint {
    std::string category;
    int wm_yr_wk = 0;
    double mean = 0.0;
    double sd = 0.0;  // population
    std::size_t count = 0;
};

struct SalesSummaries {
    std::map<std::string, double> units_by_category;
    /// Calendar weekday names in wday order (Saturday first), with their units.
    std::vector<std::pair<std::string, double>> units_by_weekday;
    /// Sorted by category, then week.
    std::vector<PricePoint> price_over_time;
};

SalesSummaries eda_sales_summaries(const ingest::MergedTable& merged, const ingest::CalendarTable& calendar);

/// Plot payload with both results.
std::string eda_to_json(const std::optional<EventPriceStats>& events, const SalesSummaries& summaries);
/// Writes eda_event_prices.csv, eda_units_by_category.csv, eda_units_by_weekday.csv,
/// eda_price_over_time.csv and eda.json into `dir`.
void write_eda(const std::string& dir, const std::optional<EventPriceStats>& events, const SalesSummaries& summaries);

// ---- forecasting runs ----

struct RunOptions {
    int horizon = 28;
    bool clamp_negative = true;
    unsigned workers = 0;
    gbdt::GbdtParams gbdt;
};

RunOptions run_options(const BenchmarkConfig& config);

/// Holidays for the additive model: one per distinct event name, on every calendar day it occurs.
std::vector<std::pair<std::string, std::vector<int>>> calendar_holidays(const ingest::CalendarTable& calendar);

struct SingleResult {
    Model model = Model::arima;
    std::string series_id;
    std::vector<double> actual;
    ForecastResult forecast;
    double rmse = 0.0;
    /// ARIMA diagnostics, additive components or GBDT importance, as JSON.
    std::string payload;
};

/// Trains on all but the last `horizon` days and scores the held-out tail. Throws NotFound for
/// an unknown id and InvalidArgument when the series is too short.
SingleResult run_single_product(const Dataset& data, Model model, const std::string& series_id,
                                const RunOptions& options);

struct PooledGbdt {
    gbdt::GbdtModel model;
    /// One per requested wide row, in the same order.
    std::vector<ForecastResult> forecasts;
};

/// One model over the given series' training days. Forecast days get their lag and rolling
/// features recursively from earlier predictions, never from the held-out values.
PooledGbdt pooled_gbdt_forecast(const Dataset& data, std::span<const std::size_t> rows, const RunOptions& options);

/// First `n` wide rows of each category in file order, categories in the given order. Throws
/// NotFound for a category without series.
std::vector<std::size_t> select_products(const ingest::SalesWide& sales, std::span<const std::string> categories,
                                         int n_per_category);

struct ProductResult {
    Model model = Model::arima;
    std::string series_id;
    std::string category;
    std::optional<double> rmse;
    std::string error;
    ForecastResult forecast;
};

struct RmseTable {
    std::vector<std::string> categories;
    std::vector<Model> models;
    /// Mean product RMSE per (model, category); absent when every product failed.
    std::map<std::pair<Model, std::string>, double> cells;
    /// Mean of the per-product RMSEs over all categories.
    std::map<Model, double> total;
    /// Mean of the category cells.
    std::map<Model, double> category_mean;
    std::map<Model, std::size_t> failures;
};

struct BenchmarkResult {
    RmseTable table;
    /// Model-major, products in selection order.
    std::vector<ProductResult> details;
    std::vector<std::vector<double>> actuals;  // per selected product
};

BenchmarkResult run_benchmark(const Dataset& data, const BenchmarkConfig& config);
RmseTable summarize(std::span<const ProductResult> details, std::span<const std::string> categories,
                    std::span<const Model> models);

/// model,category,RMSE rows plus one Total and one CategoryMean row per model.
void write_rmse_table(std::ostream& out, const RmseTable& table);
/// model,id,category,rmse,error.
void write_details(std::ostream& out, std::span<const ProductResult> details);
/// Writes rmse_table.csv, details.csv and forecasts_<model>.csv into config.output_dir.
void write_benchmark(const BenchmarkResult& result, const BenchmarkConfig& config);

/// id,F1..Fh, one row per forecast. Throws InvalidArgument on mixed horizons, NotFound when the
/// file cannot be written.
void export_forecasts(std::span<const ForecastResult> forecasts, const std::string& path);
/// Reads a file written by export_forecasts. Throws ParseError.
std::vector<ForecastResult> read_forecasts(const std::string& path);

}  // namespace retail::bench
