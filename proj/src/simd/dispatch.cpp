#include <cstdlib>
#include <string_view>

#include "retail/simd/kernels.hpp"

namespace retail::simd {

namespace {

Isa detect() {
    if (const char* forced = std::getenv("RETAIL_SIMD"); forced != nullptr && std::string_view(forced) == "scalar") {
        return Isa::scalar;
    }
    return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

}  // namespace

bool isa_supported(Isa isa) {
    switch (isa) {
        case Isa::scalar:
            return true;
        case Isa::avx2:
#if defined(RETAIL_HAVE_AVX2_VARIANT)
            return __builtin_cpu_supports("avx2") != 0;
#else
            return false;
#endif
    }
    return false;
}

Isa active_isa() {
    static const Isa isa = detect();
    return isa;
}

std::string_view isa_name(Isa isa) {
    return isa == Isa::avx2 ? "avx2" : "scalar";
}

#if defined(RETAIL_HAVE_AVX2_VARIANT)
#define RETAIL_DISPATCH(fn, ...) \
    return active_isa() == Isa::avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__)
#else
#define RETAIL_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__)
#endif

double dot(std::span<const double> a, std::span<const double> b) {
    RETAIL_DISPATCH(dot, a, b);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    RETAIL_DISPATCH(axpy, alpha, x, y);
}

double sum_squared_diff(std::span<const double> a, std::span<const double> b) {
    RETAIL_DISPATCH(sum_squared_diff, a, b);
}

void accumulate_histogram(const HistogramArgs& args) {
    RETAIL_DISPATCH(accumulate_histogram, args);
}

#undef RETAIL_DISPATCH

}  // namespace retail::simd
