#include "retail/core/linalg.hpp"

#include <cmath>

#include "retail/core/error.hpp"
#include "retail/simd/kernels.hpp"

namespace retail::linalg {

namespace {

bool cholesky_in_place(SquareMatrix& a) {
    const std::size_t n = a.n;
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) {
            d -= a(j, k) * a(j, k);
        }
        if (!(d > 0.0)) {
            return false;
        }
        d = std::sqrt(d);
        a(j, j) = d;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) {
                s -= a(i, k) * a(j, k);
            }
            a(i, j) = s / d;
        }
    }
    return true;
}

}  // namespace

std::vector<double> solve_spd(SquareMatrix a, std::span<const double> b, double jitter) {
    const std::size_t n = a.n;
    if (b.size() != n) {
        throw InvalidArgument("solve_spd: dimension mismatch");
    }
    double mean_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_diag += std::abs(a(i, i));
    }
    mean_diag = n ? mean_diag / static_cast<double>(n) : 0.0;
    if (mean_diag == 0.0) {
        mean_diag = 1.0;
    }

    SquareMatrix factor = a;
    double ridge = 0.0;
    for (int attempt = 0; !cholesky_in_place(factor); ++attempt) {
        if (attempt > 12) {
            throw DegenerateInput("solve_spd: matrix is not positive definite");
        }
        ridge = ridge == 0.0 ? jitter * mean_diag : ridge * 100.0;
        factor = a;
        for (std::size_t i = 0; i < n; ++i) {
            factor(i, i) += ridge;
        }
    }

    std::vector<double> x(b.begin(), b.end());
    for (std::size_t i = 0; i < n; ++i) {
        double s = x[i];
        for (std::size_t k = 0; k < i; ++k) {
            s -= factor(i, k) * x[k];
        }
        x[i] = s / factor(i, i);
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = x[i];
        for (std::size_t k = i + 1; k < n; ++k) {
            s -= factor(k, i) * x[k];
        }
        x[i] = s / factor(i, i);
    }
    return x;
}

std::vector<double> least_squares(std::span<const double> design, std::size_t cols, std::span<const double> y) {
    if (cols == 0 || design.size() != y.size() * cols) {
        throw InvalidArgument("least_squares: design shape mismatch");
    }
    const std::size_t rows = y.size();
    // Column-major copy so the Gram entries are contiguous dot products.
    std::vector<std::vector<double>> columns(cols, std::vector<double>(rows));
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            columns[c][r] = design[r * cols + c];
        }
    }
    SquareMatrix gram(cols);
    std::vector<double> rhs(cols);
    for (std::size_t i = 0; i < cols; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            gram(i, j) = gram(j, i) = simd::dot(columns[i], columns[j]);
        }
        rhs[i] = simd::dot(columns[i], y);
    }
    return solve_spd(std::move(gram), rhs);
}

}  // namespace retail::linalg
