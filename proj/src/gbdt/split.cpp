#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "retail/core/error.hpp"
#include "retail/gbdt/tree.hpp"

namespace retail::gbdt {

namespace {

void add(NodeSums& s, const HistCell& c) {
    s.grad += c.grad;
    s.hess += c.hess;
    s.count += c.count;
}

NodeSums minus(const NodeSums& a, const NodeSums& b) {
    return {a.grad - b.grad, a.hess - b.hess, a.count - b.count};
}

// Evaluates one partition and keeps it if strictly better.
struct Scan {
    const NodeSums& node;
    double min_count;
    double parent_score;
    std::optional<SplitCandidate>& best;

    bool offer(const NodeSums& left, std::size_t feature, ColumnKind kind, std::uint16_t threshold_bin,
               bool missing_left) {
        const NodeSums right = minus(node, left);
        if (left.count < min_count || right.count < min_count) {
            return false;
        }
        const double gain = leaf_score(left.grad, left.hess) + leaf_score(right.grad, right.hess) - parent_score;
        if (!(gain > 0.0) || (best && !(gain > best->gain))) {
            return false;
        }
        if (!best) {
            best.emplace();
        }
        best->feature = feature;
        best->kind = kind;
        best->threshold_bin = threshold_bin;
        best->left_bins.clear();
        best->missing_left = missing_left;
        best->gain = gain;
        best->left = left;
        best->right = right;
        return true;
    }
};

}  // namespace

double leaf_score(double grad, double hess) {
    return grad * grad / (hess + kLambda);
}

double leaf_value(double grad, double hess) {
    return -grad / (hess + kLambda);
}

std::optional<SplitCandidate> best_split(std::span<const std::span<const HistCell>> histograms,
                                         std::span<const ColumnKind> kinds, const NodeSums& node,
                                         int min_data_in_leaf) {
    std::optional<SplitCandidate> best;
    const double min_count = std::max(1, min_data_in_leaf);
    if (node.count < 2.0 * min_count) {
        return best;
    }
    Scan scan{node, min_count, leaf_score(node.grad, node.hess), best};

    std::vector<std::uint16_t> order;
    std::vector<std::pair<double, std::uint16_t>> keyed;
    for (std::size_t f = 0; f < histograms.size(); ++f) {
        const auto hist = histograms[f];
        if (hist.size() < 3) {
            continue;
        }
        const HistCell& missing = hist[kMissingBin];
        const bool has_missing = missing.count > 0.0;

        if (kinds[f] == ColumnKind::numeric) {
            NodeSums left;
            for (std::size_t t = 1; t + 1 < hist.size(); ++t) {
                add(left, hist[t]);
                const auto bin = static_cast<std::uint16_t>(t);
                scan.offer(left, f, ColumnKind::numeric, bin, false);
                if (has_missing) {
                    NodeSums with_missing = left;
                    add(with_missing, missing);
                    scan.offer(with_missing, f, ColumnKind::numeric, bin, true);
                }
            }
            continue;
        }

        // Categories present in the node, by gradient/hessian ratio; prefixes go left.
        order.clear();
        for (std::size_t b = 1; b < hist.size(); ++b) {
            if (hist[b].count > 0.0) {
                order.push_back(static_cast<std::uint16_t>(b));
            }
        }
        // Ties keep ascending bin order.
        keyed.clear();
        for (const auto b : order) {
            keyed.emplace_back(hist[b].grad / hist[b].hess, b);
        }
        std::sort(keyed.begin(), keyed.end());
        for (std::size_t k = 0; k < keyed.size(); ++k) {
            order[k] = keyed[k].second;
        }
        NodeSums left;
        for (std::size_t k = 0; k + 1 < order.size(); ++k) {
            add(left, hist[order[k]]);
            bool improved = scan.offer(left, f, ColumnKind::categorical, 0, false);
            if (has_missing) {
                NodeSums with_missing = left;
                add(with_missing, missing);
                improved = scan.offer(with_missing, f, ColumnKind::categorical, 0, true) || improved;
            }
            if (improved) {
                best->left_bins.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k + 1));
                std::sort(best->left_bins.begin(), best->left_bins.end());
            }
        }
    }
    return best;
}

std::pair<double, double> poisson_grad_hess(double score, double target) {
    if (target < 0.0) {
        throw InvalidArgument("poisson objective needs non-negative targets, got " + std::to_string(target));
    }
    const double mu = std::exp(score);
    return {mu - target, mu};
}

GossSample goss_sample(std::span<const double> gradients, double a, double b, std::mt19937_64& rng) {
    if (a < 0.0 || b < 0.0 || a > 1.0 || b > 1.0 || a + b > 1.0 + 1e-12) {
        throw InvalidArgument("goss fractions must satisfy 0 <= a, b and a + b <= 1");
    }
    const std::size_t n = gradients.size();
    auto count_for = [n](double fraction) {
        const double c = std::ceil(fraction * static_cast<double>(n) - 1e-9);
        return std::min(n, static_cast<std::size_t>(std::max(0.0, c)));
    };
    const std::size_t top = count_for(a);

    // 0 = dropped, 1 = top row, 2 = sampled row.
    std::vector<std::uint8_t> state(n, 0);
    if (top == n) {
        std::fill(state.begin(), state.end(), 1);
    } else if (top > 0) {
        // The top-th largest |g|; rows above it are in, ties at it fill up by index.
        std::vector<double> magnitude(n);
        for (std::size_t i = 0; i < n; ++i) {
            magnitude[i] = std::abs(gradients[i]);
        }
        std::nth_element(magnitude.begin(), magnitude.begin() + static_cast<std::ptrdiff_t>(top - 1), magnitude.end(),
                         std::greater<>());
        const double cut = magnitude[top - 1];
        std::size_t taken = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(gradients[i]) > cut) {
                state[i] = 1;
                ++taken;
            }
        }
        for (std::size_t i = 0; i < n && taken < top; ++i) {
            if (std::abs(gradients[i]) == cut) {
                state[i] = 1;
                ++taken;
            }
        }
    }
    if (b > 0.0 && top < n) {
        std::vector<std::uint32_t> rest;
        rest.reserve(n - top);
        for (std::size_t i = 0; i < n; ++i) {
            if (state[i] == 0) {
                rest.push_back(static_cast<std::uint32_t>(i));
            }
        }
        const std::size_t take = std::min(rest.size(), count_for(b));
        for (std::size_t i = 0; i < take; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, rest.size() - 1);
            std::swap(rest[i], rest[pick(rng)]);
            state[rest[i]] = 2;
        }
    }

    GossSample out;
    const double weight = b > 0.0 ? (1.0 - a) / b : 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (state[i] != 0) {
            out.rows.push_back(static_cast<std::uint32_t>(i));
            out.weights.push_back(state[i] == 1 ? 1.0 : weight);
        }
    }
    return out;
}

std::size_t Tree::leaves() const {
    return static_cast<std::size_t>(
        std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& node) { return node.is_leaf(); }));
}

std::vector<std::uint8_t> decision_table(const TreeNode& node, std::size_t num_bins) {
    std::vector<std::uint8_t> table(num_bins, 0);
    for (std::size_t b = 0; b < num_bins; ++b) {
        table[b] = goes_left(node, static_cast<std::uint16_t>(b)) ? 1 : 0;
    }
    return table;
}

TreeRouter::TreeRouter(const Tree& tree, const BinnedData& data) : nodes_(tree.nodes.size()) {
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        const auto& node = tree.nodes[i];
        nodes_[i].value = node.value;
        if (node.is_leaf()) {
            continue;
        }
        const auto f = static_cast<std::size_t>(node.feature);
        nodes_[i].feature = node.feature;
        nodes_[i].bins = data.column(f).data();
        nodes_[i].table = decision_table(node, data.mapper(f).num_bins());
        nodes_[i].left = node.left;
        nodes_[i].right = node.right;
    }
}

void TreeRouter::add_scores(std::span<const std::uint32_t> rows, std::span<double> score) const {
    std::vector<std::uint32_t> buf(rows.begin(), rows.end());
    std::vector<std::uint32_t> right(rows.size());
    struct Range {
        int node;
        std::size_t begin;
        std::size_t end;
    };
    std::vector<Range> stack{{0, 0, buf.size()}};
    while (!stack.empty()) {
        const Range at = stack.back();
        stack.pop_back();
        const Node& n = nodes_[static_cast<std::size_t>(at.node)];
        if (n.feature < 0) {
            for (std::size_t k = at.begin; k < at.end; ++k) {
                score[buf[k]] += n.value;
            }
            continue;
        }
        std::size_t nl = at.begin;
        std::size_t nr = 0;
        for (std::size_t k = at.begin; k < at.end; ++k) {
            const std::uint32_t r = buf[k];
            const std::uint8_t l = n.table[n.bins[r]];
            buf[nl] = r;
            right[nr] = r;
            nl += l;
            nr += 1 - l;
        }
        std::copy(right.begin(), right.begin() + static_cast<std::ptrdiff_t>(nr),
                  buf.begin() + static_cast<std::ptrdiff_t>(nl));
        stack.push_back({n.left, at.begin, nl});
        stack.push_back({n.right, nl, at.end});
    }
}

int Tree::leaf_for_bins(const BinnedData& data, std::size_t row) const {
    int at = 0;
    while (!nodes[static_cast<std::size_t>(at)].is_leaf()) {
        const auto& node = nodes[static_cast<std::size_t>(at)];
        at = goes_left(node, data.column(static_cast<std::size_t>(node.feature))[row]) ? node.left : node.right;
    }
    return at;
}

}  // namespace retail::gbdt
