// Compiled with -mavx2. Only reached through dispatch after a CPUID check.
#include <immintrin.h>

#include <cassert>

#include "retail/simd/kernels.hpp"

namespace retail::simd::avx2 {

namespace {

double horizontal_sum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d pair = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    const std::size_t n = a.size();
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i)));
        acc1 = _mm256_add_pd(acc1,
                             _mm256_mul_pd(_mm256_loadu_pd(a.data() + i + 4), _mm256_loadu_pd(b.data() + i + 4)));
    }
    double sum = horizontal_sum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        sum += a[i] * b[i];
    }
    return sum;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    assert(x.size() == y.size());
    const std::size_t n = x.size();
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x.data() + i));
        _mm256_storeu_pd(y.data() + i, _mm256_add_pd(_mm256_loadu_pd(y.data() + i), prod));
    }
    for (; i < n; ++i) {
        y[i] = y[i] + alpha * x[i];
    }
}

double sum_squared_diff(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    const std::size_t n = a.size();
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i));
        const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a.data() + i + 4), _mm256_loadu_pd(b.data() + i + 4));
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(d0, d0));
        acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(d1, d1));
    }
    double sum = horizontal_sum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

// A cell is four doubles {grad, hess, count, pad}; one 256-bit add updates all of them, which
// performs the same per-lane additions in the same order as the scalar loop.
void accumulate_histogram(const HistogramArgs& args) {
    const std::uint16_t* bins = args.matrix.bins;
    const std::size_t columns = args.matrix.columns;
    double* hist = reinterpret_cast<double*>(args.hist);
    for (const std::uint32_t row : args.rows) {
        const __m256d update = _mm256_set_pd(0.0, 1.0, args.hess[row], args.grad[row]);
        const std::uint16_t* row_bins = bins + static_cast<std::size_t>(row) * columns;
        for (std::size_t c = args.col_begin; c < args.col_end; ++c) {
            double* cell = hist + 4 * (args.col_offset[c] + row_bins[c]);
            _mm256_store_pd(cell, _mm256_add_pd(_mm256_load_pd(cell), update));
        }
    }
}

}  // namespace retail::simd::avx2
