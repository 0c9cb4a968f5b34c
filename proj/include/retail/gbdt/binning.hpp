#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "retail/core/column.hpp"
#include "retail/simd/kernels.hpp"

namespace retail::gbdt {

using simd::HistCell;

/// Bin 0 holds missing values in every feature.
inline constexpr std::uint16_t kMissingBin = 0;

/// Quantizer for one feature, fixed once per training run.
///
/// Numeric: value bins 1..B with inclusive upper bounds; bin b holds values in
/// (upper[b-2], upper[b-1]], the last bin is unbounded above. Categorical: one bin per distinct
/// id seen in training, in ascending id order.
struct BinMapper {
    ColumnKind kind = ColumnKind::numeric;
    std::vector<double> upper;       // numeric: B - 1 finite bounds
    std::vector<double> categories;  // categorical: sorted ids

    /// Total bins including the missing bin.
    std::size_t num_bins() const;
    /// Unknown categories map to the missing bin.
    std::uint16_t bin(std::optional<double> value) const;
    /// Largest value of numeric bin b (1-based value bins); +inf for the last.
    double upper_bound(std::uint16_t b) const;
    /// Bin that holds 0.0, if the feature can represent it.
    std::optional<std::uint16_t> zero_bin() const;
};

/// Equal-frequency bounds with at most `max_bins` value bins; one bin per distinct value when
/// there are few enough. Categorical ids must be non-negative integers (InvalidArgument).
BinMapper fit_bin_mapper(const NullableColumn& column, ColumnKind kind, int max_bins);

/// Feature-major bin indices for a set of columns.
class BinnedData {
public:
    /// Fits a mapper per column.
    BinnedData(std::span<const FeatureColumn> columns, int max_bins);
    /// Applies existing mappers.
    BinnedData(std::span<const FeatureColumn> columns, std::vector<BinMapper> mappers);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t features() const noexcept { return mappers_.size(); }
    const BinMapper& mapper(std::size_t feature) const { return mappers_[feature]; }
    const std::vector<BinMapper>& mappers() const noexcept { return mappers_; }
    std::span<const std::uint16_t> column(std::size_t feature) const { return bins_[feature]; }
    /// Rows outside the feature's zero bin (all rows when it has none).
    std::size_t nonzero_count(std::size_t feature) const;

private:
    void fill(std::span<const FeatureColumn> columns);

    std::size_t rows_ = 0;
    std::vector<BinMapper> mappers_;
    std::vector<std::vector<std::uint16_t>> bins_;
};

/// Per-bin gradient/hessian sums and counts of one feature over `rows`; cell 0 is missing.
std::vector<HistCell> build_histogram(const BinnedData& data, std::size_t feature,
                                      std::span<const std::uint32_t> rows, std::span<const double> grad,
                                      std::span<const double> hess);

/// Features sharing one histogram column. A single-feature bundle stores the feature's bins
/// unchanged. In a larger bundle, bin 0 means "every member in its zero bin" and member i's
/// other bins occupy offsets[i] + 1 .. offsets[i] + num_bins - 2 in order, skipping the zero bin.
struct Bundle {
    std::vector<std::size_t> features;
    std::vector<std::uint32_t> offsets;

    /// Total bins of the bundle column.
    std::size_t num_bins(const BinnedData& data) const;
};

/// Greedy exclusive-feature bundling. Only numeric features without missing values that have a
/// zero bin are eligible. They are taken by nonzero count, descending (ties by index), each into
/// the first bundle whose pairwise conflict total stays within `max_conflict` after adding it.
/// Every other feature follows with a bundle of its own, in index order.
std::vector<Bundle> efb_bundle(const BinnedData& data, std::size_t max_conflict);

}  // namespace retail::gbdt
