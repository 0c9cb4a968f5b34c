#include "retail/gbdt/binning.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "retail/core/error.hpp"

namespace retail::gbdt {

namespace {

constexpr std::size_t kMaxCategories = std::numeric_limits<std::uint16_t>::max() - 1;

// Bound between two adjacent distinct values; falls back to the lower one when the midpoint
// rounds onto either end.
double bound_between(double lo, double hi) {
    const double mid = lo + (hi - lo) / 2.0;
    return (mid >= lo && mid < hi) ? mid : lo;
}

bool usable(const NullableColumn& column, std::size_t i) {
    return column.has(i) && !std::isnan(column.values[i]);
}

}  // namespace

std::size_t BinMapper::num_bins() const {
    return 1 + (kind == ColumnKind::numeric ? upper.size() + 1 : categories.size());
}

std::uint16_t BinMapper::bin(std::optional<double> value) const {
    if (!value || std::isnan(*value)) {
        return kMissingBin;
    }
    if (kind == ColumnKind::numeric) {
        const auto it = std::lower_bound(upper.begin(), upper.end(), *value);
        return static_cast<std::uint16_t>(1 + (it - upper.begin()));
    }
    const auto it = std::lower_bound(categories.begin(), categories.end(), *value);
    if (it == categories.end() || *it != *value) {
        return kMissingBin;
    }
    return static_cast<std::uint16_t>(1 + (it - categories.begin()));
}

double BinMapper::upper_bound(std::uint16_t b) const {
    if (b == 0 || b > upper.size()) {
        return std::numeric_limits<double>::infinity();
    }
    return upper[b - 1];
}

std::optional<std::uint16_t> BinMapper::zero_bin() const {
    if (kind == ColumnKind::numeric) {
        return bin(0.0);
    }
    const std::uint16_t b = bin(0.0);
    return b == kMissingBin ? std::nullopt : std::optional<std::uint16_t>(b);
}

BinMapper fit_bin_mapper(const NullableColumn& column, ColumnKind kind, int max_bins) {
    if (max_bins < 2) {
        throw InvalidArgument("max_bins must be at least 2");
    }
    std::vector<double> values;
    values.reserve(column.size());
    for (std::size_t i = 0; i < column.size(); ++i) {
        if (usable(column, i)) {
            values.push_back(column.values[i]);
        }
    }
    std::sort(values.begin(), values.end());

    BinMapper mapper;
    mapper.kind = kind;
    if (kind == ColumnKind::categorical) {
        for (double v : values) {
            if (v < 0.0 || v != std::floor(v)) {
                throw InvalidArgument("categorical values must be non-negative integer ids, got " + std::to_string(v));
            }
        }
        values.erase(std::unique(values.begin(), values.end()), values.end());
        if (values.size() > kMaxCategories) {
            throw InvalidArgument("categorical feature has more than " + std::to_string(kMaxCategories) +
                                  " categories");
        }
        mapper.categories = std::move(values);
        return mapper;
    }

    // Distinct values with their counts.
    std::vector<double> distinct;
    std::vector<std::size_t> counts;
    for (double v : values) {
        if (distinct.empty() || v != distinct.back()) {
            distinct.push_back(v);
            counts.push_back(0);
        }
        ++counts.back();
    }
    const std::size_t limit = static_cast<std::size_t>(max_bins);
    if (distinct.size() <= limit) {
        for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
            mapper.upper.push_back(bound_between(distinct[i], distinct[i + 1]));
        }
        return mapper;
    }
    // Equal frequency: close a bin once the running count passes the next multiple of n / B.
    const double per_bin = static_cast<double>(values.size()) / static_cast<double>(limit);
    std::size_t cumulative = 0;
    for (std::size_t i = 0; i + 1 < distinct.size() && mapper.upper.size() + 1 < limit; ++i) {
        cumulative += counts[i];
        if (static_cast<double>(cumulative) >= per_bin * static_cast<double>(mapper.upper.size() + 1)) {
            mapper.upper.push_back(bound_between(distinct[i], distinct[i + 1]));
        }
    }
    return mapper;
}

BinnedData::BinnedData(std::span<const FeatureColumn> columns, int max_bins) {
    mappers_.reserve(columns.size());
    for (const auto& c : columns) {
        mappers_.push_back(fit_bin_mapper(c.values, c.kind, max_bins));
    }
    fill(columns);
}

BinnedData::BinnedData(std::span<const FeatureColumn> columns, std::vector<BinMapper> mappers)
    : mappers_(std::move(mappers)) {
    if (mappers_.size() != columns.size()) {
        throw InvalidArgument("bin mappers and columns differ in count");
    }
    fill(columns);
}

void BinnedData::fill(std::span<const FeatureColumn> columns) {
    rows_ = columns.empty() ? 0 : columns[0].values.size();
    bins_.resize(columns.size());
    for (std::size_t f = 0; f < columns.size(); ++f) {
        const auto& col = columns[f].values;
        if (col.size() != rows_ || col.present.size() != rows_) {
            throw InvalidArgument("feature column '" + columns[f].name + "' has a different length");
        }
        auto& out = bins_[f];
        out.resize(rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            out[i] = mappers_[f].bin(usable(col, i) ? std::optional<double>(col.values[i]) : std::nullopt);
        }
    }
}

std::size_t BinnedData::nonzero_count(std::size_t feature) const {
    const auto zero = mappers_[feature].zero_bin();
    if (!zero) {
        return rows_;
    }
    return static_cast<std::size_t>(
        std::count_if(bins_[feature].begin(), bins_[feature].end(), [&](std::uint16_t b) { return b != *zero; }));
}

std::vector<HistCell> build_histogram(const BinnedData& data, std::size_t feature,
                                      std::span<const std::uint32_t> rows, std::span<const double> grad,
                                      std::span<const double> hess) {
    std::vector<HistCell> hist(data.mapper(feature).num_bins());
    const auto bins = data.column(feature);
    const std::size_t offset = 0;
    simd::HistogramArgs args;
    args.matrix = {bins.data(), 1};
    args.rows = rows;
    args.grad = grad;
    args.hess = hess;
    args.col_offset = std::span<const std::size_t>(&offset, 1);
    args.col_begin = 0;
    args.col_end = 1;
    args.hist = hist.data();
    simd::accumulate_histogram(args);
    return hist;
}

std::size_t Bundle::num_bins(const BinnedData& data) const {
    if (features.size() == 1) {
        return data.mapper(features[0]).num_bins();
    }
    return 1 + offsets.back() + (data.mapper(features.back()).num_bins() - 2);
}

std::vector<Bundle> efb_bundle(const BinnedData& data, std::size_t max_conflict) {
    const std::size_t n = data.rows();
    const std::size_t words = (n + 63) / 64;
    std::vector<std::size_t> eligible;
    std::vector<Bundle> singles;
    for (std::size_t f = 0; f < data.features(); ++f) {
        const auto& m = data.mapper(f);
        const auto col = data.column(f);
        const bool has_missing = std::find(col.begin(), col.end(), kMissingBin) != col.end();
        if (m.kind == ColumnKind::numeric && m.zero_bin() && !has_missing && m.num_bins() > 2) {
            eligible.push_back(f);
        } else {
            singles.push_back({{f}, {0}});
        }
    }

    std::vector<std::size_t> nonzero(data.features(), 0);
    std::vector<std::vector<std::uint64_t>> masks(data.features());
    for (std::size_t f : eligible) {
        const std::uint16_t zero = *data.mapper(f).zero_bin();
        const auto col = data.column(f);
        auto& mask = masks[f];
        mask.assign(words, 0);
        for (std::size_t i = 0; i < n; ++i) {
            if (col[i] != zero) {
                mask[i / 64] |= std::uint64_t{1} << (i % 64);
                ++nonzero[f];
            }
        }
    }
    std::stable_sort(eligible.begin(), eligible.end(),
                     [&](std::size_t a, std::size_t b) { return nonzero[a] > nonzero[b]; });

    auto conflicts = [&](std::size_t a, std::size_t b) {
        std::size_t c = 0;
        for (std::size_t w = 0; w < words; ++w) {
            c += static_cast<std::size_t>(std::popcount(masks[a][w] & masks[b][w]));
        }
        return c;
    };
    constexpr std::size_t kMaxBundleBins = std::numeric_limits<std::uint16_t>::max();

    std::vector<Bundle> bundles;
    std::vector<std::size_t> bundle_conflict;
    std::vector<std::size_t> bundle_bins;
    for (std::size_t f : eligible) {
        const std::size_t extra_bins = data.mapper(f).num_bins() - 2;
        bool placed = false;
        for (std::size_t b = 0; b < bundles.size() && !placed; ++b) {
            if (bundle_bins[b] + extra_bins > kMaxBundleBins) {
                continue;
            }
            std::size_t added = 0;
            for (std::size_t g : bundles[b].features) {
                added += conflicts(f, g);
            }
            if (bundle_conflict[b] + added <= max_conflict) {
                bundles[b].offsets.push_back(static_cast<std::uint32_t>(bundle_bins[b] - 1));
                bundles[b].features.push_back(f);
                bundle_conflict[b] += added;
                bundle_bins[b] += extra_bins;
                placed = true;
            }
        }
        if (!placed) {
            bundles.push_back({{f}, {0}});
            bundle_conflict.push_back(0);
            bundle_bins.push_back(1 + extra_bins);
        }
    }
    bundles.insert(bundles.end(), singles.begin(), singles.end());
    return bundles;
}

}  // namespace retail::gbdt
