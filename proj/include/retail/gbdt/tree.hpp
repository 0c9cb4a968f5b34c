#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "retail/gbdt/binning.hpp"
#include "retail/gbdt/params.hpp"

namespace retail::gbdt {

struct TreeNode {
    int feature = -1;  // -1 for a leaf
    // Numeric split: bins 1..threshold_bin (values <= threshold) go left.
    std::uint16_t threshold_bin = 0;
    double threshold = 0.0;
    // Categorical split: these bins (ascending) and their ids go left; everything else right.
    std::vector<std::uint16_t> left_bins;
    std::vector<double> left_categories;
    bool missing_left = false;
    int left = -1;
    int right = -1;
    double value = 0.0;     // leaf output, score space
    std::size_t count = 0;  // training rows that reached the node

    bool is_leaf() const noexcept { return feature < 0; }
};

/// Node 0 is the root.
struct Tree {
    std::vector<TreeNode> nodes;

    std::size_t leaves() const;
    std::size_t internal_nodes() const { return nodes.size() - leaves(); }
    /// Leaf index reached by a row of binned features.
    int leaf_for_bins(const BinnedData& data, std::size_t row) const;
};

/// Whether a binned value goes left at an internal node.
inline bool goes_left(const TreeNode& node, std::uint16_t bin) {
    if (bin == kMissingBin) {
        return node.missing_left;
    }
    if (node.left_bins.empty()) {
        return bin <= node.threshold_bin;
    }
    return std::binary_search(node.left_bins.begin(), node.left_bins.end(), bin);
}

/// goes_left for every bin of a node's feature, 1 = left.
std::vector<std::uint8_t> decision_table(const TreeNode& node, std::size_t num_bins);

/// Walks many rows through one tree with per-node lookup tables.
class TreeRouter {
public:
    TreeRouter(const Tree& tree, const BinnedData& data);
    int leaf(std::size_t row) const {
        int at = 0;
        while (nodes_[static_cast<std::size_t>(at)].feature >= 0) {
            const auto& n = nodes_[static_cast<std::size_t>(at)];
            at = n.table[n.bins[row]] ? n.left : n.right;
        }
        return at;
    }
    /// Adds each row's leaf value to score[row]; rows are routed node by node.
    void add_scores(std::span<const std::uint32_t> rows, std::span<double> score) const;

private:
    struct Node {
        int feature = -1;
        double value = 0.0;
        const std::uint16_t* bins = nullptr;
        std::vector<std::uint8_t> table;
        int left = 0;
        int right = 0;
    };
    std::vector<Node> nodes_;
};

struct NodeSums {
    double grad = 0.0;
    double hess = 0.0;
    double count = 0.0;
};

/// G^2 / (H + lambda)
double leaf_score(double grad, double hess);
/// -G / (H + lambda)
double leaf_value(double grad, double hess);

struct SplitCandidate {
    std::size_t feature = 0;
    ColumnKind kind = ColumnKind::numeric;
    std::uint16_t threshold_bin = 0;
    std::vector<std::uint16_t> left_bins;  // categorical
    bool missing_left = false;
    double gain = 0.0;
    NodeSums left;
    NodeSums right;
};

/// Best admissible split over every feature's histogram (cell 0 = missing), or nothing when no
/// split has positive gain with both children holding at least min_data_in_leaf rows.
/// Candidates are scanned by feature, then threshold (or category prefix length), then
/// missing-right before missing-left; only a strictly larger gain replaces the incumbent.
std::optional<SplitCandidate> best_split(std::span<const std::span<const HistCell>> histograms,
                                         std::span<const ColumnKind> kinds, const NodeSums& node,
                                         int min_data_in_leaf);

/// Gradient and hessian of e^f - y f. Throws InvalidArgument for y < 0.
std::pair<double, double> poisson_grad_hess(double score, double target);

struct GossSample {
    std::vector<std::uint32_t> rows;  // ascending
    std::vector<double> weights;      // parallel to rows
};

/// Keeps the ceil(a n) rows with the largest |gradient| (ties to the lower index) at weight 1
/// and a uniform ceil(b n) of the rest at weight (1 - a) / b.
GossSample goss_sample(std::span<const double> gradients, double a, double b, std::mt19937_64& rng);

/// Leaf-wise tree growth over binned data, with histograms built per bundle column.
class TreeLearner {
public:
    TreeLearner(const BinnedData& data, std::vector<Bundle> bundles, unsigned threads = 1);

    struct Grown {
        Tree tree;  // leaf values are -G / (H + lambda), unscaled
        /// Rows of each leaf: order[leaf_begin[i] .. leaf_begin[i + 1]) reached leaf_nodes[i].
        std::vector<std::uint32_t> order;
        std::vector<std::size_t> leaf_begin;
        std::vector<int> leaf_nodes;
    };

    /// `rows` ascending; grad and hess are indexed by row id and already weighted.
    Grown grow(std::span<const std::uint32_t> rows, std::span<const double> grad, std::span<const double> hess,
               int max_leaves, int min_data_in_leaf) const;

    const std::vector<Bundle>& bundles() const noexcept { return bundles_; }

private:
    void build(std::span<const std::uint32_t> rows, std::span<const double> grad, std::span<const double> hess,
               std::vector<HistCell>& hist) const;
    std::optional<SplitCandidate> find_split(const std::vector<HistCell>& hist, const NodeSums& sums,
                                             int min_data_in_leaf) const;

    const BinnedData& data_;
    std::vector<Bundle> bundles_;
    unsigned threads_;
    std::vector<std::size_t> col_offset_;      // first cell of each bundle column
    std::vector<std::size_t> bundle_of_;       // per feature
    std::vector<std::size_t> member_index_;    // per feature, position inside its bundle
    std::vector<std::uint16_t> matrix_;        // row-major bundle bins
    std::size_t total_cells_ = 0;
    std::vector<ColumnKind> kinds_;
};

/// One tree on every row without bundling.
Tree grow_tree(const BinnedData& data, std::span<const double> grad, std::span<const double> hess,
               const GbdtParams& params);

}  // namespace retail::gbdt
