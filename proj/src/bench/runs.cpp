#include <spdlog/spdlog.h>

#include <algorithm>
#include <numeric>

#include "json.hpp"

#include "retail/additive/additive.hpp"
#include "retail/arima/arima.hpp"
#include "retail/bench/bench.hpp"
#include "retail/core/error.hpp"
#include "retail/core/parallel.hpp"
#include "retail/core/series_ops.hpp"
#include "retail/features/features.hpp"
#include "retail/ingest/ingest.hpp"

namespace retail::bench {

namespace {

// Two 28-day lag windows of history before the first forecast.
constexpr int kMinTrainDays = 56;

TimeSeries full_series(const ingest::SalesWide& sales, std::size_t row) {
    const auto days = static_cast<std::size_t>(sales.days);
    const auto begin = sales.sales.begin() + static_cast<std::ptrdiff_t>(row * days);
    return TimeSeries(sales.keys[row].id, 1, std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(days)));
}

void check_length(const ingest::SalesWide& sales, int horizon) {
    if (horizon < 1) {
        throw InvalidArgument("horizon must be at least 1");
    }
    if (sales.days - horizon < kMinTrainDays) {
        throw InvalidArgument("series of " + std::to_string(sales.days) + " days leaves fewer than " +
                              std::to_string(kMinTrainDays) + " training days at horizon " + std::to_string(horizon));
    }
}

struct ModelRun {
    ForecastResult forecast;
    std::string payload;
};

ModelRun run_arima(const TimeSeries& train, int horizon, unsigned workers, bool with_payload) {
    arima::GridSearchOptions grid;
    grid.workers = workers;
    const auto result = arima::grid_search_arima(train, grid);
    ModelRun run{arima::forecast_arima(result.fit, horizon), {}};
    if (with_payload) {
        try {
            run.payload = arima::diagnostics_to_json(arima::diagnostics(result.fit), result.fit);
        } catch (const InvalidArgument& e) {
            run.payload = nlohmann::json{{"order", result.order.to_string()}, {"diagnostics", e.what()}}.dump();
        }
    }
    return run;
}

additive::AdditiveConfig additive_config(const TimeSeries& train,
                                         const std::vector<std::pair<std::string, std::vector<int>>>& holidays) {
    additive::AdditiveConfig config;
    // Seasonal terms need two full periods of history.
    std::erase_if(config.seasonalities, [&](const additive::Seasonality& s) {
        return 2.0 * s.period > static_cast<double>(train.size());
    });
    for (const auto& [name, days] : holidays) {
        config.holidays.push_back({name, days, 10.0});
    }
    return config;
}

ModelRun run_additive(const TimeSeries& train, int horizon,
                      const std::vector<std::pair<std::string, std::vector<int>>>& holidays, bool with_payload) {
    const auto fit = additive::fit_additive(train, additive_config(train, holidays));
    for (const auto& w : fit.warnings) {
        spdlog::debug("{}: {}", train.id(), w);
    }
    ModelRun run{additive::forecast_additive(fit, horizon), {}};
    if (with_payload) {
        const auto c = additive::components(fit, fit.first_day, fit.last_day + horizon);
        run.payload = additive::components_to_json(c, fit);
    }
    return run;
}

std::string importance_json(const gbdt::GbdtModel& model) {
    nlohmann::ordered_json doc;
    doc["trees"] = model.trees.size();
    doc["importance"] = feature_importance(model);
    return doc.dump();
}

}  // namespace

std::vector<std::pair<std::string, std::vector<int>>> calendar_holidays(const ingest::CalendarTable& calendar) {
    std::vector<std::pair<std::string, std::vector<int>>> out;
    std::map<std::string, std::size_t> index;
    for (const auto& row : calendar.rows) {
        if (row.event_name_1.empty()) {
            continue;
        }
        auto [it, inserted] = index.emplace(row.event_name_1, out.size());
        if (inserted) {
            out.push_back({row.event_name_1, {}});
        }
        out[it->second].second.push_back(row.day);
    }
    return out;
}

PooledGbdt pooled_gbdt_forecast(const Dataset& data, std::span<const std::size_t> rows, const RunOptions& options) {
    check_length(data.sales, options.horizon);
    if (rows.empty()) {
        throw InvalidArgument("pooled gbdt needs at least one series");
    }
    const auto days = static_cast<std::size_t>(data.sales.days);
    const auto horizon = static_cast<std::size_t>(options.horizon);
    const std::size_t train_days = days - horizon;

    const std::vector<std::size_t> selected(rows.begin(), rows.end());
    const auto long_sales = ingest::melt_wide_to_long(data.sales, selected);
    const auto matrix = features::build_feature_matrix(long_sales, data.calendar, data.prices, options.workers);

    // Rows are series-major over days 1..days; keep the training days.
    std::vector<FeatureColumn> train_columns(matrix.columns.size());
    std::vector<double> train_target;
    train_target.reserve(selected.size() * train_days);
    for (std::size_t f = 0; f < matrix.columns.size(); ++f) {
        const auto& src = matrix.columns[f];
        auto& dst = train_columns[f];
        dst.name = src.name;
        dst.kind = src.kind;
        for (std::size_t s = 0; s < selected.size(); ++s) {
            for (std::size_t d = 0; d < train_days; ++d) {
                const std::size_t r = s * days + d;
                if (src.values.has(r)) {
                    dst.values.push_back(src.values.values[r]);
                } else {
                    dst.values.push_back(std::nullopt);
                }
            }
        }
    }
    for (std::size_t s = 0; s < selected.size(); ++s) {
        for (std::size_t d = 0; d < train_days; ++d) {
            train_target.push_back(matrix.target[s * days + d]);
        }
    }

    PooledGbdt out;
    out.model = gbdt::train(train_columns, train_target, options.gbdt);

    std::vector<const features::LagSpec*> lag_of(matrix.columns.size(), nullptr);
    for (std::size_t f = 0; f < matrix.columns.size(); ++f) {
        for (const auto& spec : features::kLagFeatures) {
            if (matrix.columns[f].name == spec.name) {
                lag_of[f] = &spec;
            }
        }
    }
    out.forecasts.resize(selected.size());
    parallel_for(selected.size(), options.workers, [&](std::size_t s) {
        std::vector<double> history(train_target.begin() + static_cast<std::ptrdiff_t>(s * train_days),
                                    train_target.begin() + static_cast<std::ptrdiff_t>((s + 1) * train_days));
        auto& fc = out.forecasts[s];
        fc.series_id = data.sales.keys[selected[s]].id;
        fc.first_day = static_cast<int>(train_days) + 1;
        std::vector<std::optional<double>> row(matrix.columns.size());
        for (std::size_t step = 0; step < horizon; ++step) {
            const std::size_t t = train_days + step;
            const std::size_t r = s * days + t;
            for (std::size_t f = 0; f < matrix.columns.size(); ++f) {
                if (lag_of[f]) {
                    row[f] = features::lag_feature(history, t, *lag_of[f]);
                } else {
                    const auto& col = matrix.columns[f].values;
                    row[f] = col.has(r) ? std::optional<double>(col.values[r]) : std::nullopt;
                }
            }
            double y = gbdt::predict_one(out.model, row);
            if (options.clamp_negative) {
                y = std::max(y, 0.0);
            }
            fc.point.push_back(y);
            history.push_back(y);
        }
    });
    return out;
}

SingleResult run_single_product(const Dataset& data, Model model, const std::string& series_id,
                                const RunOptions& options) {
    const std::size_t row = data.sales.find(series_id);
    check_length(data.sales, options.horizon);
    const auto series = full_series(data.sales, row);
    const auto h = static_cast<std::size_t>(options.horizon);
    const auto train = series.head(series.size() - h);

    SingleResult out;
    out.model = model;
    out.series_id = series_id;
    const auto tail = series.tail(h);
    out.actual.assign(tail.values().begin(), tail.values().end());
    switch (model) {
        case Model::arima: {
            auto run = run_arima(train, options.horizon, options.workers, true);
            out.forecast = std::move(run.forecast);
            out.payload = std::move(run.payload);
            break;
        }
        case Model::additive: {
            auto run = run_additive(train, options.horizon, calendar_holidays(data.calendar), true);
            out.forecast = std::move(run.forecast);
            out.payload = std::move(run.payload);
            break;
        }
        case Model::gbdt: {
            const std::size_t rows[] = {row};
            auto pooled = pooled_gbdt_forecast(data, rows, options);
            out.forecast = std::move(pooled.forecasts[0]);
            out.payload = importance_json(pooled.model);
            break;
        }
    }
    if (options.clamp_negative) {
        clamp_non_negative(out.forecast);
    }
    out.rmse = rmse(out.actual, out.forecast.point);
    return out;
}

std::vector<std::size_t> select_products(const ingest::SalesWide& sales, std::span<const std::string> categories,
                                         int n_per_category) {
    std::vector<std::size_t> out;
    for (const auto& cat : categories) {
        int taken = 0;
        for (std::size_t r = 0; r < sales.rows() && taken < n_per_category; ++r) {
            if (sales.keys[r].cat_id == cat) {
                out.push_back(r);
                ++taken;
            }
        }
        if (taken == 0) {
            throw NotFound("no series in category '" + cat + "'");
        }
        if (taken < n_per_category) {
            spdlog::warn("category {} has only {} series", cat, taken);
        }
    }
    return out;
}

RmseTable summarize(std::span<const ProductResult> details, std::span<const std::string> categories,
                    std::span<const Model> models) {
    RmseTable table;
    table.categories.assign(categories.begin(), categories.end());
    table.models.assign(models.begin(), models.end());
    for (const Model m : models) {
        double total = 0.0;
        std::size_t n_total = 0;
        std::size_t failures = 0;
        double cell_sum = 0.0;
        std::size_t cells = 0;
        for (const auto& cat : categories) {
            double sum = 0.0;
            std::size_t n = 0;
            for (const auto& d : details) {
                if (d.model != m || d.category != cat) {
                    continue;
                }
                if (d.rmse) {
                    sum += *d.rmse;
                    ++n;
                } else {
                    ++failures;
                }
            }
            if (n > 0) {
                const double cell = sum / static_cast<double>(n);
                table.cells[{m, cat}] = cell;
                cell_sum += cell;
                ++cells;
            }
            total += sum;
            n_total += n;
        }
        if (n_total > 0) {
            table.total[m] = total / static_cast<double>(n_total);
        }
        if (cells > 0) {
            table.category_mean[m] = cell_sum / static_cast<double>(cells);
        }
        table.failures[m] = failures;
    }
    return table;
}

BenchmarkResult run_benchmark(const Dataset& data, const BenchmarkConfig& config) {
    config.validate();
    check_length(data.sales, config.horizon);
    const auto options = run_options(config);
    const auto selected = select_products(data.sales, config.categories, config.n_per_category);
    const auto h = static_cast<std::size_t>(config.horizon);
    const auto holidays = calendar_holidays(data.calendar);

    BenchmarkResult out;
    std::vector<TimeSeries> train;
    for (const std::size_t r : selected) {
        const auto series = full_series(data.sales, r);
        train.push_back(series.head(series.size() - h));
        const auto tail = series.tail(h);
        out.actuals.emplace_back(tail.values().begin(), tail.values().end());
    }
    auto blank = [&](Model m, std::size_t k) {
        ProductResult p;
        p.model = m;
        p.series_id = data.sales.keys[selected[k]].id;
        p.category = data.sales.keys[selected[k]].cat_id;
        return p;
    };
    auto score = [&](ProductResult& p, std::size_t k, ForecastResult forecast) {
        if (config.clamp_negative) {
            clamp_non_negative(forecast);
        }
        p.rmse = rmse(out.actuals[k], forecast.point);
        p.forecast = std::move(forecast);
    };

    for (const Model m : config.models) {
        std::vector<ProductResult> results(selected.size());
        for (std::size_t k = 0; k < selected.size(); ++k) {
            results[k] = blank(m, k);
        }
        spdlog::info("{}: {} series", model_name(m), selected.size());
        if (m == Model::gbdt) {
            try {
                auto pooled = pooled_gbdt_forecast(data, selected, options);
                for (std::size_t k = 0; k < selected.size(); ++k) {
                    score(results[k], k, std::move(pooled.forecasts[k]));
                }
            } catch (const std::exception& e) {
                for (auto& p : results) {
                    p.error = e.what();
                }
            }
        } else {
            parallel_for(selected.size(), config.workers, [&](std::size_t k) {
                try {
                    auto run = m == Model::arima ? run_arima(train[k], config.horizon, 1, false)
                                                 : run_additive(train[k], config.horizon, holidays, false);
                    score(results[k], k, std::move(run.forecast));
                } catch (const std::exception& e) {
                    results[k].error = e.what();
                }
            });
        }
        for (const auto& p : results) {
            if (!p.rmse) {
                spdlog::warn("{} failed on {}: {}", model_name(m), p.series_id, p.error);
            }
        }
        std::move(results.begin(), results.end(), std::back_inserter(out.details));
    }
    out.table = summarize(out.details, config.categories, config.models);
    return out;
}

}  // namespace retail::bench
