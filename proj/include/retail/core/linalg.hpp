#pragma once

#include <span>
#include <vector>

namespace retail::linalg {

/// Dense row-major square matrix, just enough for the small normal-equation systems used here.
struct SquareMatrix {
    std::size_t n = 0;
    std::vector<double> a;

    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t size) : n(size), a(size * size, 0.0) {}

    double& operator()(std::size_t r, std::size_t c) { return a[r * n + c]; }
    double operator()(std::size_t r, std::size_t c) const { return a[r * n + c]; }
};

/// Solves A x = b for symmetric positive (semi-)definite A via Cholesky. A ridge of
/// `jitter * mean(diag)` is added when the factorization meets a non-positive pivot.
std::vector<double> solve_spd(SquareMatrix a, std::span<const double> b, double jitter = 1e-10);

/// Ordinary least squares for a row-major n x p design: argmin ||y - X beta||^2.
std::vector<double> least_squares(std::span<const double> design, std::size_t cols, std::span<const double> y);

}  // namespace retail::linalg
