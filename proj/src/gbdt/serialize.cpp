#include <fstream>
#include <sstream>

#include "json.hpp"

#include "retail/core/error.hpp"
#include "retail/gbdt/model.hpp"

namespace retail::gbdt {

namespace {

using Json = nlohmann::ordered_json;

constexpr int kFormatVersion = 1;
constexpr const char* kFormatName = "retail-gbdt";
const std::string kSource = "<gbdt model>";

[[noreturn]] void malformed(const std::string& what) {
    throw ParseError(kSource, 1, "malformed model: " + what);
}

Json node_to_json(const TreeNode& node) {
    Json j;
    if (node.is_leaf()) {
        j["leaf"] = node.value;
        j["count"] = node.count;
        return j;
    }
    j["feature"] = node.feature;
    if (node.left_bins.empty()) {
        j["threshold_bin"] = node.threshold_bin;
        j["threshold"] = node.threshold;
    } else {
        j["left_bins"] = node.left_bins;
        j["left_categories"] = node.left_categories;
    }
    j["missing_left"] = node.missing_left;
    j["left"] = node.left;
    j["right"] = node.right;
    j["count"] = node.count;
    return j;
}

TreeNode node_from_json(const Json& j, std::size_t features, std::size_t nodes) {
    TreeNode node;
    node.count = j.at("count").get<std::size_t>();
    if (j.contains("leaf")) {
        node.value = j.at("leaf").get<double>();
        return node;
    }
    node.feature = j.at("feature").get<int>();
    if (node.feature < 0 || static_cast<std::size_t>(node.feature) >= features) {
        malformed("node feature out of range");
    }
    if (j.contains("left_bins")) {
        node.left_bins = j.at("left_bins").get<std::vector<std::uint16_t>>();
        node.left_categories = j.at("left_categories").get<std::vector<double>>();
        if (node.left_bins.empty() || node.left_bins.size() != node.left_categories.size()) {
            malformed("categorical split without categories");
        }
    } else {
        node.threshold_bin = j.at("threshold_bin").get<std::uint16_t>();
        node.threshold = j.at("threshold").get<double>();
    }
    node.missing_left = j.at("missing_left").get<bool>();
    node.left = j.at("left").get<int>();
    node.right = j.at("right").get<int>();
    if (node.left <= 0 || node.right <= 0 || static_cast<std::size_t>(node.left) >= nodes ||
        static_cast<std::size_t>(node.right) >= nodes) {
        malformed("child index out of range");
    }
    return node;
}

}  // namespace

std::string to_json(const GbdtModel& model) {
    Json doc;
    doc["format"] = kFormatName;
    doc["version"] = kFormatVersion;
    doc["objective"] = std::string(objective_name(model.objective));
    doc["base_score"] = model.base_score;
    Json features = Json::array();
    for (std::size_t f = 0; f < model.features(); ++f) {
        Json feature;
        feature["name"] = model.feature_names[f];
        const auto& bins = model.bins[f];
        if (bins.kind == ColumnKind::numeric) {
            feature["kind"] = "numeric";
            feature["upper"] = bins.upper;
        } else {
            feature["kind"] = "categorical";
            feature["categories"] = bins.categories;
        }
        features.push_back(std::move(feature));
    }
    doc["features"] = std::move(features);
    Json trees = Json::array();
    for (const auto& tree : model.trees) {
        Json nodes = Json::array();
        for (const auto& node : tree.nodes) {
            nodes.push_back(node_to_json(node));
        }
        trees.push_back(Json{{"nodes", std::move(nodes)}});
    }
    doc["trees"] = std::move(trees);
    return doc.dump();
}

GbdtModel from_json(const std::string& text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ParseError(kSource, 1, e.what());
    }
    try {
        if (doc.at("format").get<std::string>() != kFormatName) {
            malformed("unknown format");
        }
        const int version = doc.at("version").get<int>();
        if (version != kFormatVersion) {
            malformed("unsupported version " + std::to_string(version));
        }
        GbdtModel model;
        model.objective = parse_objective(doc.at("objective").get<std::string>());
        model.base_score = doc.at("base_score").get<double>();
        for (const auto& feature : doc.at("features")) {
            model.feature_names.push_back(feature.at("name").get<std::string>());
            BinMapper bins;
            const auto kind = feature.at("kind").get<std::string>();
            if (kind == "numeric") {
                bins.upper = feature.at("upper").get<std::vector<double>>();
            } else if (kind == "categorical") {
                bins.kind = ColumnKind::categorical;
                bins.categories = feature.at("categories").get<std::vector<double>>();
            } else {
                malformed("unknown feature kind '" + kind + "'");
            }
            model.bins.push_back(std::move(bins));
        }
        for (const auto& tree_doc : doc.at("trees")) {
            const auto& nodes = tree_doc.at("nodes");
            if (nodes.empty()) {
                malformed("empty tree");
            }
            Tree tree;
            for (const auto& node : nodes) {
                tree.nodes.push_back(node_from_json(node, model.features(), nodes.size()));
            }
            model.trees.push_back(std::move(tree));
        }
        return model;
    } catch (const Json::exception& e) {
        malformed(e.what());
    } catch (const InvalidArgument& e) {
        malformed(e.what());
    }
}

void save_model(const GbdtModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw NotFound("cannot write " + path);
    }
    out << to_json(model) << '\n';
}

GbdtModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw NotFound("cannot open " + path);
    }
    std::ostringstream text;
    text << in.rdbuf();
    return from_json(text.str());
}

}  // namespace retail::gbdt
