#include <algorithm>

#include "retail/core/error.hpp"
#include "retail/core/parallel.hpp"
#include "retail/gbdt/tree.hpp"

namespace retail::gbdt {

namespace {

// Position of a non-zero value bin among a bundle member's bins.
std::size_t member_rank(std::uint16_t bin, std::uint16_t zero) {
    return static_cast<std::size_t>(bin) - 1 - (bin > zero ? 1 : 0);
}

NodeSums sum_rows(std::span<const std::uint32_t> rows, std::span<const double> grad, std::span<const double> hess) {
    NodeSums s;
    for (const std::uint32_t r : rows) {
        s.grad += grad[r];
        s.hess += hess[r];
    }
    s.count = static_cast<double>(rows.size());
    return s;
}

struct Leaf {
    std::size_t begin = 0;
    std::size_t end = 0;
    NodeSums sums;
    std::vector<HistCell> hist;
    std::optional<SplitCandidate> split;
    int node = 0;
};

}  // namespace

TreeLearner::TreeLearner(const BinnedData& data, std::vector<Bundle> bundles, unsigned threads)
    : data_(data), bundles_(std::move(bundles)), threads_(threads == 0 ? default_workers() : threads) {
    const std::size_t features = data_.features();
    bundle_of_.assign(features, bundles_.size());
    member_index_.assign(features, 0);
    for (std::size_t b = 0; b < bundles_.size(); ++b) {
        col_offset_.push_back(total_cells_);
        total_cells_ += bundles_[b].num_bins(data_);
        for (std::size_t i = 0; i < bundles_[b].features.size(); ++i) {
            const std::size_t f = bundles_[b].features[i];
            if (f >= features || bundle_of_[f] != bundles_.size()) {
                throw InvalidArgument("bundles must cover every feature exactly once");
            }
            bundle_of_[f] = b;
            member_index_[f] = i;
        }
    }
    if (std::find(bundle_of_.begin(), bundle_of_.end(), bundles_.size()) != bundle_of_.end()) {
        throw InvalidArgument("bundles must cover every feature exactly once");
    }
    for (std::size_t f = 0; f < features; ++f) {
        kinds_.push_back(data_.mapper(f).kind);
    }

    const std::size_t n = data_.rows();
    const std::size_t columns = bundles_.size();
    matrix_.assign(n * columns, 0);
    for (std::size_t b = 0; b < columns; ++b) {
        const auto& bundle = bundles_[b];
        if (bundle.features.size() == 1) {
            const auto col = data_.column(bundle.features[0]);
            for (std::size_t r = 0; r < n; ++r) {
                matrix_[r * columns + b] = col[r];
            }
            continue;
        }
        // On conflicting rows the first member wins.
        for (std::size_t i = bundle.features.size(); i-- > 0;) {
            const std::size_t f = bundle.features[i];
            const std::uint16_t zero = *data_.mapper(f).zero_bin();
            const auto col = data_.column(f);
            for (std::size_t r = 0; r < n; ++r) {
                if (col[r] != zero) {
                    matrix_[r * columns + b] =
                        static_cast<std::uint16_t>(bundle.offsets[i] + 1 + member_rank(col[r], zero));
                }
            }
        }
    }
}

void TreeLearner::build(std::span<const std::uint32_t> rows, std::span<const double> grad,
                        std::span<const double> hess, std::vector<HistCell>& hist) const {
    hist.assign(total_cells_, HistCell{});
    const std::size_t columns = bundles_.size();
    const std::size_t chunks = std::min<std::size_t>(threads_, columns);
    parallel_for(chunks, static_cast<unsigned>(chunks), [&](std::size_t chunk) {
        simd::HistogramArgs args;
        args.matrix = {matrix_.data(), columns};
        args.rows = rows;
        args.grad = grad;
        args.hess = hess;
        args.col_offset = col_offset_;
        args.col_begin = columns * chunk / chunks;
        args.col_end = columns * (chunk + 1) / chunks;
        args.hist = hist.data();
        simd::accumulate_histogram(args);
    });
}

std::optional<SplitCandidate> TreeLearner::find_split(const std::vector<HistCell>& hist, const NodeSums& sums,
                                                      int min_data_in_leaf) const {
    if (sums.count < 2.0 * std::max(1, min_data_in_leaf)) {
        return std::nullopt;
    }
    const std::size_t features = data_.features();
    std::vector<std::span<const HistCell>> views(features);
    std::vector<std::vector<HistCell>> decoded;
    decoded.reserve(features);
    for (std::size_t f = 0; f < features; ++f) {
        const std::size_t b = bundle_of_[f];
        const auto& bundle = bundles_[b];
        const std::size_t bins = data_.mapper(f).num_bins();
        if (bundle.features.size() == 1) {
            views[f] = std::span<const HistCell>(hist.data() + col_offset_[b], bins);
            continue;
        }
        // Member histogram: non-zero bins read back, the zero bin is the node remainder.
        const std::uint16_t zero = *data_.mapper(f).zero_bin();
        const std::size_t base = col_offset_[b] + bundle.offsets[member_index_[f]] + 1;
        auto& cells = decoded.emplace_back(bins);
        HistCell rest{sums.grad, sums.hess, sums.count, 0.0};
        for (std::size_t v = 1; v < bins; ++v) {
            if (v == zero) {
                continue;
            }
            cells[v] = hist[base + member_rank(static_cast<std::uint16_t>(v), zero)];
            rest.grad -= cells[v].grad;
            rest.hess -= cells[v].hess;
            rest.count -= cells[v].count;
        }
        cells[zero] = rest;
        views[f] = cells;
    }
    return best_split(views, kinds_, sums, min_data_in_leaf);
}

TreeLearner::Grown TreeLearner::grow(std::span<const std::uint32_t> rows, std::span<const double> grad,
                                     std::span<const double> hess, int max_leaves, int min_data_in_leaf) const {
    Grown out;
    out.order.assign(rows.begin(), rows.end());
    std::vector<Leaf> leaves(1);
    leaves[0].end = rows.size();
    leaves[0].sums = sum_rows(rows, grad, hess);
    out.tree.nodes.emplace_back();
    out.tree.nodes[0].count = rows.size();
    if (max_leaves > 1) {
        build(rows, grad, hess, leaves[0].hist);
        leaves[0].split = find_split(leaves[0].hist, leaves[0].sums, min_data_in_leaf);
    }

    std::vector<std::uint32_t> right_rows;
    while (leaves.size() < static_cast<std::size_t>(max_leaves)) {
        std::size_t pick = leaves.size();
        for (std::size_t i = 0; i < leaves.size(); ++i) {
            if (leaves[i].split && (pick == leaves.size() || leaves[i].split->gain > leaves[pick].split->gain)) {
                pick = i;
            }
        }
        if (pick == leaves.size()) {
            break;
        }
        Leaf parent = std::move(leaves[pick]);
        const SplitCandidate split = std::move(parent.split).value();
        const auto& mapper = data_.mapper(split.feature);

        const int parent_node = parent.node;
        const int left_node = static_cast<int>(out.tree.nodes.size());
        {
            TreeNode& node = out.tree.nodes[static_cast<std::size_t>(parent_node)];
            node.feature = static_cast<int>(split.feature);
            node.missing_left = split.missing_left;
            node.left = left_node;
            node.right = left_node + 1;
            if (split.kind == ColumnKind::numeric) {
                node.threshold_bin = split.threshold_bin;
                node.threshold = mapper.upper_bound(split.threshold_bin);
            } else {
                node.left_bins = split.left_bins;
                for (const auto b : split.left_bins) {
                    node.left_categories.push_back(mapper.categories[b - 1]);
                }
            }
        }
        const TreeNode& decision = out.tree.nodes[static_cast<std::size_t>(parent_node)];

        // Stable partition of the parent's rows.
        const auto column = data_.column(split.feature);
        const auto table = decision_table(decision, mapper.num_bins());
        right_rows.clear();
        std::size_t mid = parent.begin;
        for (std::size_t i = parent.begin; i < parent.end; ++i) {
            const std::uint32_t r = out.order[i];
            if (table[column[r]]) {
                out.order[mid++] = r;
            } else {
                right_rows.push_back(r);
            }
        }
        std::copy(right_rows.begin(), right_rows.end(), out.order.begin() + static_cast<std::ptrdiff_t>(mid));

        Leaf left;
        left.begin = parent.begin;
        left.end = mid;
        left.node = left_node;
        Leaf right;
        right.begin = mid;
        right.end = parent.end;
        right.node = left_node + 1;
        const std::span<const std::uint32_t> order(out.order);
        left.sums = sum_rows(order.subspan(left.begin, left.end - left.begin), grad, hess);
        right.sums = sum_rows(order.subspan(right.begin, right.end - right.begin), grad, hess);
        for (const Leaf* child : {&left, &right}) {
            TreeNode node;
            node.count = child->end - child->begin;
            out.tree.nodes.push_back(node);
        }

        // Build the smaller child; the larger one is the parent minus it.
        const bool left_smaller = (left.end - left.begin) <= (right.end - right.begin);
        Leaf& small = left_smaller ? left : right;
        Leaf& large = left_smaller ? right : left;
        build(order.subspan(small.begin, small.end - small.begin), grad, hess, small.hist);
        large.hist = std::move(parent.hist);
        for (std::size_t c = 0; c < total_cells_; ++c) {
            large.hist[c].grad -= small.hist[c].grad;
            large.hist[c].hess -= small.hist[c].hess;
            large.hist[c].count -= small.hist[c].count;
        }
        const bool room = leaves.size() + 1 < static_cast<std::size_t>(max_leaves);
        for (Leaf* child : {&left, &right}) {
            if (room) {
                child->split = find_split(child->hist, child->sums, min_data_in_leaf);
            }
        }
        leaves[pick] = std::move(left);
        leaves.push_back(std::move(right));
    }

    std::sort(leaves.begin(), leaves.end(), [](const Leaf& a, const Leaf& b) { return a.begin < b.begin; });
    for (const auto& leaf : leaves) {
        out.tree.nodes[static_cast<std::size_t>(leaf.node)].value = leaf_value(leaf.sums.grad, leaf.sums.hess);
        out.leaf_begin.push_back(leaf.begin);
        out.leaf_nodes.push_back(leaf.node);
    }
    out.leaf_begin.push_back(rows.size());
    return out;
}

Tree grow_tree(const BinnedData& data, std::span<const double> grad, std::span<const double> hess,
               const GbdtParams& params) {
    std::vector<Bundle> singles;
    for (std::size_t f = 0; f < data.features(); ++f) {
        singles.push_back({{f}, {0}});
    }
    TreeLearner learner(data, std::move(singles), params.num_threads);
    std::vector<std::uint32_t> rows(data.rows());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i] = static_cast<std::uint32_t>(i);
    }
    return learner.grow(rows, grad, hess, params.max_leaves, params.min_data_in_leaf).tree;
}

}  // namespace retail::gbdt
