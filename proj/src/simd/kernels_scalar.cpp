#include "retail/simd/kernels.hpp"

#include <cassert>

namespace retail::simd::scalar {

double dot(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sum += a[i] * b[i];
    }
    return sum;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    assert(x.size() == y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i] = y[i] + alpha * x[i];
    }
}

double sum_squared_diff(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

void accumulate_histogram(const HistogramArgs& args) {
    const std::uint16_t* bins = args.matrix.bins;
    const std::size_t columns = args.matrix.columns;
    for (const std::uint32_t row : args.rows) {
        const double g = args.grad[row];
        const double h = args.hess[row];
        const std::uint16_t* row_bins = bins + static_cast<std::size_t>(row) * columns;
        for (std::size_t c = args.col_begin; c < args.col_end; ++c) {
            HistCell& cell = args.hist[args.col_offset[c] + row_bins[c]];
            cell.grad += g;
            cell.hess += h;
            cell.count += 1.0;
        }
    }
}

}  // namespace retail::simd::scalar
