#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

// Data-parallel inner loops shared by the forecasting engines.
//
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2 variant compiled in
// its own translation unit. The active variant is chosen once at startup from CPUID; setting the
// environment variable RETAIL_SIMD=scalar forces the reference path.
//
// Elementwise kernels (axpy, histogram accumulation) are bit-identical across variants.
// Reductions (dot, sum_squared_diff) reassociate the sum and agree to rounding.

namespace retail::simd {

enum class Isa { scalar, avx2 };

/// Variant used by the dispatching entry points below.
Isa active_isa();
std::string_view isa_name(Isa isa);
/// True when `isa` can execute on this machine.
bool isa_supported(Isa isa);

/// One histogram cell: gradient sum, hessian sum, row count, and padding to 32 bytes so one
/// AVX2 register covers a cell.
struct alignas(32) HistCell {
    double grad = 0.0;
    double hess = 0.0;
    double count = 0.0;
    double pad = 0.0;
};

/// Row-major matrix of bin indices: `columns` entries per row.
struct BinMatrixView {
    const std::uint16_t* bins = nullptr;
    std::size_t columns = 0;
};

/// For every row r in `rows` and every column c in [col_begin, col_end):
///   hist[col_offset[c] + bins[r * columns + c]] += {grad[r], hess[r], 1}
/// Rows are visited in the given order, so each cell's summation order is fixed.
struct HistogramArgs {
    BinMatrixView matrix;
    std::span<const std::uint32_t> rows;
    std::span<const double> grad;  // indexed by row id
    std::span<const double> hess;  // indexed by row id
    std::span<const std::size_t> col_offset;
    std::size_t col_begin = 0;
    std::size_t col_end = 0;
    HistCell* hist = nullptr;
};

double dot(std::span<const double> a, std::span<const double> b);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
/// sum_i (a_i - b_i)^2
double sum_squared_diff(std::span<const double> a, std::span<const double> b);
void accumulate_histogram(const HistogramArgs& args);

namespace scalar {
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
double sum_squared_diff(std::span<const double> a, std::span<const double> b);
void accumulate_histogram(const HistogramArgs& args);
}  // namespace scalar

// Defined by the build when the AVX2 translation unit is compiled in.
#if defined(RETAIL_HAVE_AVX2_VARIANT)
namespace avx2 {
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
double sum_squared_diff(std::span<const double> a, std::span<const double> b);
void accumulate_histogram(const HistogramArgs& args);
}  // namespace avx2
#endif

}  // namespace retail::simd
