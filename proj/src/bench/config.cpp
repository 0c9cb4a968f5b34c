#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <unordered_map>

#include "retail/bench/bench.hpp"
#include "retail/core/error.hpp"

namespace retail::bench {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= value.size()) {
        const auto comma = value.find(',', start);
        const auto item = trim(std::string_view(value).substr(start, comma == std::string::npos ? std::string::npos
                                                                                                 : comma - start));
        if (!item.empty()) {
            out.push_back(item);
        }
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

template <typename T>
T parse_number(const std::string& value) {
    T out{};
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end) {
        throw InvalidArgument("not a number: '" + value + "'");
    }
    return out;
}

bool parse_flag(const std::string& value) {
    if (value == "true" || value == "on" || value == "yes" || value == "1") {
        return true;
    }
    if (value == "false" || value == "off" || value == "no" || value == "0") {
        return false;
    }
    throw InvalidArgument("not a flag: '" + value + "'");
}

}  // namespace

std::string_view model_name(Model model) {
    switch (model) {
        case Model::arima:
            return "arima";
        case Model::additive:
            return "additive";
        case Model::gbdt:
            return "gbdt";
    }
    return "?";
}

Model parse_model(std::string_view name) {
    if (name == "arima") {
        return Model::arima;
    }
    if (name == "additive" || name == "prophet") {
        return Model::additive;
    }
    if (name == "gbdt" || name == "lightgbm") {
        return Model::gbdt;
    }
    throw InvalidArgument("unknown model '" + std::string(name) + "'");
}

void BenchmarkConfig::validate() const {
    if (horizon < 1) {
        throw InvalidArgument("horizon must be at least 1");
    }
    if (n_per_category < 1) {
        throw InvalidArgument("n_per_category must be at least 1");
    }
    if (categories.empty()) {
        throw InvalidArgument("no categories selected");
    }
    if (models.empty()) {
        throw InvalidArgument("no models selected");
    }
    gbdt::validate(gbdt);
}

BenchmarkConfig parse_config(std::istream& in, const std::string& source, const std::string& base_dir) {
    BenchmarkConfig config;
    auto path = [&](const std::string& value) {
        const std::filesystem::path p(value);
        return (p.is_absolute() || base_dir.empty()) ? value : (std::filesystem::path(base_dir) / p).string();
    };
    using Setter = std::function<void(const std::string&)>;
    const std::unordered_map<std::string, Setter> setters{
        {"horizon", [&](const std::string& v) { config.horizon = parse_number<int>(v); }},
        {"n_per_category", [&](const std::string& v) { config.n_per_category = parse_number<int>(v); }},
        {"categories", [&](const std::string& v) { config.categories = split_list(v); }},
        {"models",
         [&](const std::string& v) {
             config.models.clear();
             for (const auto& name : split_list(v)) {
                 const Model m = parse_model(name);
                 if (std::find(config.models.begin(), config.models.end(), m) == config.models.end()) {
                     config.models.push_back(m);
                 }
             }
         }},
        {"seed",
         [&](const std::string& v) {
             config.seed = parse_number<std::uint64_t>(v);
             config.gbdt.seed = config.seed;
         }},
        {"clamp_negative", [&](const std::string& v) { config.clamp_negative = parse_flag(v); }},
        {"calendar", [&](const std::string& v) { config.calendar_path = path(v); }},
        {"sales", [&](const std::string& v) { config.sales_path = path(v); }},
        {"prices", [&](const std::string& v) { config.prices_path = path(v); }},
        {"output_dir", [&](const std::string& v) { config.output_dir = path(v); }},
        {"workers", [&](const std::string& v) { config.workers = parse_number<unsigned>(v); }},
        {"gbdt.objective", [&](const std::string& v) { config.gbdt.objective = gbdt::parse_objective(v); }},
        {"gbdt.learning_rate", [&](const std::string& v) { config.gbdt.learning_rate = parse_number<double>(v); }},
        {"gbdt.num_iterations", [&](const std::string& v) { config.gbdt.num_iterations = parse_number<int>(v); }},
        {"gbdt.bagging_frequency",
         [&](const std::string& v) { config.gbdt.bagging_frequency = parse_number<int>(v); }},
        {"gbdt.min_data_in_leaf", [&](const std::string& v) { config.gbdt.min_data_in_leaf = parse_number<int>(v); }},
        {"gbdt.max_leaves", [&](const std::string& v) { config.gbdt.max_leaves = parse_number<int>(v); }},
        {"gbdt.max_bins", [&](const std::string& v) { config.gbdt.max_bins = parse_number<int>(v); }},
        {"gbdt.goss_a", [&](const std::string& v) { config.gbdt.goss_a = parse_number<double>(v); }},
        {"gbdt.goss_b", [&](const std::string& v) { config.gbdt.goss_b = parse_number<double>(v); }},
        {"gbdt.enable_efb", [&](const std::string& v) { config.gbdt.enable_efb = parse_flag(v); }},
        {"gbdt.efb_max_conflict", [&](const std::string& v) { config.gbdt.efb_max_conflict = parse_number<int>(v); }},
        {"gbdt.num_threads", [&](const std::string& v) { config.gbdt.num_threads = parse_number<unsigned>(v); }},
    };

    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        const std::string text = trim(std::string_view(line).substr(0, hash));
        if (text.empty()) {
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            throw ParseError(source, number, "expected key = value");
        }
        const std::string key = trim(std::string_view(text).substr(0, eq));
        const std::string value = trim(std::string_view(text).substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end()) {
            throw ParseError(source, number, "unknown key '" + key + "'");
        }
        try {
            it->second(value);
        } catch (const InvalidArgument& e) {
            throw ParseError(source, number, key + ": " + e.what());
        }
    }
    try {
        config.validate();
    } catch (const InvalidArgument& e) {
        throw ParseError(source, number, e.what());
    }
    return config;
}

BenchmarkConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw NotFound("cannot open config " + path);
    }
    return parse_config(in, path, std::filesystem::path(path).parent_path().string());
}

RunOptions run_options(const BenchmarkConfig& config) {
    RunOptions o;
    o.horizon = config.horizon;
    o.clamp_negative = config.clamp_negative;
    o.workers = config.workers;
    o.gbdt = config.gbdt;
    return o;
}

}  // namespace retail::bench
