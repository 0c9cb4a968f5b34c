#include <filesystem>
#include <fstream>

#include "retail/bench/bench.hpp"
#include "retail/core/error.hpp"
#include "retail/ingest/csv.hpp"

namespace retail::bench {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw NotFound("cannot write " + path);
    }
    out.precision(17);
    return out;
}

}  // namespace

void write_rmse_table(std::ostream& out, const RmseTable& table) {
    out << "model,category,rmse\n";
    for (const Model m : table.models) {
        for (const auto& cat : table.categories) {
            out << model_name(m) << ',' << ingest::csv_escape(cat) << ',';
            if (const auto it = table.cells.find({m, cat}); it != table.cells.end()) {
                out << it->second;
            }
            out << '\n';
        }
        out << model_name(m) << ",Total,";
        if (const auto it = table.total.find(m); it != table.total.end()) {
            out << it->second;
        }
        out << '\n' << model_name(m) << ",CategoryMean,";
        if (const auto it = table.category_mean.find(m); it != table.category_mean.end()) {
            out << it->second;
        }
        out << '\n';
    }
}

void write_details(std::ostream& out, std::span<const ProductResult> details) {
    out << "model,id,category,rmse,error\n";
    for (const auto& d : details) {
        out << model_name(d.model) << ',' << ingest::csv_escape(d.series_id) << ',' << ingest::csv_escape(d.category)
            << ',';
        if (d.rmse) {
            out << *d.rmse;
        }
        out << ',' << ingest::csv_escape(d.error) << '\n';
    }
}

void write_benchmark(const BenchmarkResult& result, const BenchmarkConfig& config) {
    const std::filesystem::path root(config.output_dir);
    std::filesystem::create_directories(root);
    {
        auto out = open_out((root / "rmse_table.csv").string());
        write_rmse_table(out, result.table);
    }
    {
        auto out = open_out((root / "details.csv").string());
        write_details(out, result.details);
    }
    for (const Model m : config.models) {
        std::vector<ForecastResult> forecasts;
        for (const auto& d : result.details) {
            if (d.model == m && d.rmse) {
                forecasts.push_back(d.forecast);
            }
        }
        if (!forecasts.empty()) {
            export_forecasts(forecasts, (root / ("forecasts_" + std::string(model_name(m)) + ".csv")).string());
        }
    }
}

void export_forecasts(std::span<const ForecastResult> forecasts, const std::string& path) {
    const std::size_t h = forecasts.empty() ? 0 : forecasts.front().horizon();
    for (const auto& f : forecasts) {
        if (f.horizon() != h) {
            throw InvalidArgument("forecasts for export must share one horizon");
        }
    }
    auto out = open_out(path);
    out << "id";
    for (std::size_t j = 1; j <= h; ++j) {
        out << ",F" << j;
    }
    out << '\n';
    for (const auto& f : forecasts) {
        out << ingest::csv_escape(f.series_id);
        for (const double v : f.point) {
            out << ',' << v;
        }
        out << '\n';
    }
    if (!out) {
        throw NotFound("write failed for " + path);
    }
}

std::vector<ForecastResult> read_forecasts(const std::string& path) {
    ingest::CsvReader reader(path);
    std::vector<std::string> fields;
    if (!reader.next(fields) || fields.empty() || fields[0] != "id") {
        throw ParseError(path, 1, "expected header id,F1..Fh");
    }
    const std::size_t h = fields.size() - 1;
    for (std::size_t j = 1; j <= h; ++j) {
        if (fields[j] != "F" + std::to_string(j)) {
            throw ParseError(path, 1, "expected column F" + std::to_string(j));
        }
    }
    std::vector<ForecastResult> out;
    while (reader.next(fields)) {
        if (fields.size() != h + 1) {
            throw ParseError(path, reader.line(), "expected " + std::to_string(h + 1) + " fields");
        }
        ForecastResult f;
        f.series_id = fields[0];
        for (std::size_t j = 1; j <= h; ++j) {
            f.point.push_back(ingest::parse_double(fields[j], path, reader.line(), "F" + std::to_string(j)));
        }
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace retail::bench
