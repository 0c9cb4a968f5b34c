// retail: command-line front end for ingest, exploratory statistics, single-product runs,
// the multi-product benchmark and forecast export.
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 model failure.

#include <spdlog/spdlog.h>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "retail/bench/bench.hpp"
#include "retail/core/error.hpp"
#include "retail/features/features.hpp"
#include "retail/ingest/ingest.hpp"

namespace {

using namespace retail;

enum Exit { kOk = 0, kUsage = 1, kData = 2, kModel = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Inputs {
    std::string calendar = "calendar.csv";
    std::string sales = "sales_train_validation.csv";
    std::string prices = "sell_prices.csv";

    void add_to(CLI::App* cmd) {
        cmd->add_option("--calendar", calendar, "calendar file")->capture_default_str();
        cmd->add_option("--sales", sales, "wide sales file")->capture_default_str();
        cmd->add_option("--prices", prices, "weekly prices file")->capture_default_str();
    }
    bench::Dataset load() const { return bench::load_dataset(calendar, sales, prices); }
};

bench::BenchmarkConfig read_config(const std::string& path) {
    try {
        return bench::load_config(path);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
}

std::ofstream open_out(const std::string& path) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) {
        std::filesystem::create_directories(parent);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw NotFound("cannot write " + path);
    }
    return out;
}

int cmd_ingest(const Inputs& in, const std::string& out_path, const std::string& features_path, unsigned workers) {
    const auto data = in.load();
    const auto merged = bench::merge_dataset(data);
    auto out = open_out(out_path);
    ingest::write_long_csv(out, merged, data.calendar);
    spdlog::info("{} series x {} days -> {}", data.sales.rows(), data.sales.days, out_path);
    if (!features_path.empty()) {
        const auto matrix = features::build_feature_matrix(merged, data.calendar, workers);
        auto fout = open_out(features_path);
        features::write_feature_csv(fout, matrix);
        spdlog::info("feature matrix ({} rows) -> {}", matrix.rows(), features_path);
    }
    return kOk;
}

int cmd_eda(const Inputs& in, const std::string& out_dir) {
    const auto data = in.load();
    const auto merged = bench::merge_dataset(data);
    const auto events = bench::eda_event_price_stats(merged, data.calendar);
    const auto summaries = bench::eda_sales_summaries(merged, data.calendar);
    bench::write_eda(out_dir, events, summaries);
    if (events) {
        std::cout << "products compared: " << events->products << "\n"
                  << "discounted on event days: " << events->fraction_discounted << "\n"
                  << "increased on event days: " << events->fraction_increased << "\n";
    } else {
        std::cout << "no event days with prices\n";
    }
    for (const auto& [cat, units] : summaries.units_by_category) {
        std::cout << cat << ": " << units << " units\n";
    }
    return kOk;
}

int cmd_single(const Inputs& in, const std::string& model_name, const std::string& product,
               const bench::RunOptions& options, const std::string& out_dir) {
    bench::Model model;
    try {
        model = bench::parse_model(model_name);
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
    const auto data = in.load();
    const auto result = bench::run_single_product(data, model, product, options);
    std::filesystem::create_directories(out_dir);
    const std::string stem = (std::filesystem::path(out_dir) / (product + "_" + model_name)).string();
    bench::export_forecasts(std::span(&result.forecast, 1), stem + "_forecast.csv");
    open_out(stem + "_payload.json") << result.payload << '\n';
    {
        auto out = open_out(stem + "_holdout.csv");
        out.precision(17);
        out << "day,actual,forecast\n";
        for (std::size_t j = 0; j < result.actual.size(); ++j) {
            out << result.forecast.first_day + static_cast<int>(j) << ',' << result.actual[j] << ','
                << result.forecast.point[j] << '\n';
        }
    }
    std::cout << product << " " << model_name << " rmse " << result.rmse << "\n";
    return kOk;
}

int cmd_benchmark(const std::string& config_path) {
    const auto config = read_config(config_path);
    const auto data = bench::load_dataset(config.calendar_path, config.sales_path, config.prices_path);
    const auto result = bench::run_benchmark(data, config);
    bench::write_benchmark(result, config);
    bench::write_rmse_table(std::cout, result.table);
    int code = kOk;
    for (const auto m : config.models) {
        if (const auto failed = result.table.failures.at(m); failed > 0) {
            spdlog::warn("{}: {} products failed and are excluded", bench::model_name(m), failed);
        }
        if (!result.table.total.count(m)) {
            code = kModel;
        }
    }
    return code;
}

int cmd_export(const std::string& config_path, const std::string& model_name, const std::string& out_path) {
    auto config = read_config(config_path);
    try {
        config.models = {bench::parse_model(model_name)};
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
    const auto data = bench::load_dataset(config.calendar_path, config.sales_path, config.prices_path);
    const auto result = bench::run_benchmark(data, config);
    std::vector<ForecastResult> forecasts;
    for (const auto& d : result.details) {
        if (d.rmse) {
            forecasts.push_back(d.forecast);
        }
    }
    if (forecasts.empty()) {
        spdlog::error("{} produced no forecasts", model_name);
        return kModel;
    }
    bench::export_forecasts(forecasts, out_path);
    std::cout << forecasts.size() << " forecasts -> " << out_path << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Retail sales forecasting toolkit"};
    app.require_subcommand(1);
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "debug logging");

    Inputs inputs;
    unsigned workers = 0;

    auto* ingest_cmd = app.add_subcommand("ingest", "reshape and join the input files into a long table");
    inputs.add_to(ingest_cmd);
    std::string long_out = "long.csv";
    std::string features_out;
    ingest_cmd->add_option("--out", long_out, "long table output")->capture_default_str();
    ingest_cmd->add_option("--features", features_out, "also write the feature matrix here");
    ingest_cmd->add_option("--workers", workers, "threads (0 = all)");

    auto* eda_cmd = app.add_subcommand("eda", "event price and sales summaries");
    inputs.add_to(eda_cmd);
    std::string eda_out = "eda_out";
    eda_cmd->add_option("--out", eda_out, "output directory")->capture_default_str();

    auto* single_cmd = app.add_subcommand("single", "fit one model on one product and score the held-out tail");
    inputs.add_to(single_cmd);
    std::string model_name;
    std::string product;
    std::string single_out = "single_out";
    std::string single_config;
    int horizon = 28;
    bool no_clamp = false;
    single_cmd->add_option("--model", model_name, "arima, additive or gbdt")->required();
    single_cmd->add_option("--product", product, "series id")->required();
    single_cmd->add_option("--horizon", horizon, "held-out days")->capture_default_str();
    single_cmd->add_option("--config", single_config, "benchmark config for input paths and gbdt parameters");
    single_cmd->add_option("--out", single_out, "output directory")->capture_default_str();
    single_cmd->add_flag("--no-clamp", no_clamp, "keep negative forecasts");
    single_cmd->add_option("--workers", workers, "threads (0 = all)");

    auto* bench_cmd = app.add_subcommand("benchmark", "three-way benchmark over the first products per category");
    std::string bench_config;
    bench_cmd->add_option("--config", bench_config, "key = value config file")->required();

    auto* export_cmd = app.add_subcommand("export", "write one model's held-out forecasts as id,F1..Fh");
    std::string export_config;
    std::string export_model = "gbdt";
    std::string export_out = "submission.csv";
    export_cmd->add_option("--config", export_config, "key = value config file")->required();
    export_cmd->add_option("--model", export_model, "arima, additive or gbdt")->capture_default_str();
    export_cmd->add_option("--out", export_out, "output file")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }
    spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

    try {
        if (*ingest_cmd) {
            return cmd_ingest(inputs, long_out, features_out, workers);
        }
        if (*eda_cmd) {
            return cmd_eda(inputs, eda_out);
        }
        if (*single_cmd) {
            bench::RunOptions options;
            if (!single_config.empty()) {
                const auto config = read_config(single_config);
                options = bench::run_options(config);
                if (single_cmd->count("--calendar") == 0) inputs.calendar = config.calendar_path;
                if (single_cmd->count("--sales") == 0) inputs.sales = config.sales_path;
                if (single_cmd->count("--prices") == 0) inputs.prices = config.prices_path;
            }
            if (single_config.empty() || single_cmd->count("--horizon") > 0) {
                options.horizon = horizon;
            }
            if (no_clamp) {
                options.clamp_negative = false;
            }
            if (single_cmd->count("--workers") > 0) {
                options.workers = workers;
            }
            return cmd_single(inputs, model_name, product, options, single_out);
        }
        if (*bench_cmd) {
            return cmd_benchmark(bench_config);
        }
        if (*export_cmd) {
            return cmd_export(export_config, export_model, export_out);
        }
    } catch (const UsageError& e) {
        spdlog::error("{}", e.what());
        return kUsage;
    } catch (const ParseError& e) {
        spdlog::error("{}", e.what());
        return kData;
    } catch (const DataIntegrityError& e) {
        spdlog::error("{}", e.what());
        return kData;
    } catch (const NotFound& e) {
        spdlog::error("{}", e.what());
        return kData;
    } catch (const InvalidArgument& e) {
        spdlog::error("{}", e.what());
        return kUsage;
    } catch (const std::exception& e) {
        spdlog::error("model failure: {}", e.what());
        return kModel;
    }
    return kUsage;
}
