#pragma once

// Seeded generators for synthetic series used across the test suites.

#include <cstdint>
#include <random>
#include <vector>

namespace retail::testing {

inline std::vector<double> white_noise(std::size_t n, std::uint64_t seed, double sd = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, sd);
    std::vector<double> out(n);
    for (double& v : out) {
        v = normal(rng);
    }
    return out;
}

/// y_t = c + phi * y_{t-1} + e_t, started from the stationary mean after a burn-in.
inline std::vector<double> simulate_ar1(std::size_t n, double phi, double c, std::uint64_t seed, double sd = 1.0) {
    const std::size_t burn = 500;
    auto e = white_noise(n + burn, seed, sd);
    std::vector<double> out(n);
    double y = c / (1.0 - phi);
    for (std::size_t t = 0; t < n + burn; ++t) {
        y = c + phi * y + e[t];
        if (t >= burn) {
            out[t - burn] = y;
        }
    }
    return out;
}

/// y_t = c + e_t + theta * e_{t-1}
inline std::vector<double> simulate_ma1(std::size_t n, double theta, double c, std::uint64_t seed) {
    auto e = white_noise(n + 1, seed);
    std::vector<double> out(n);
    for (std::size_t t = 0; t < n; ++t) {
        out[t] = c + e[t + 1] + theta * e[t];
    }
    return out;
}

inline std::vector<double> random_walk(std::size_t n, std::uint64_t seed) {
    auto e = white_noise(n, seed);
    std::vector<double> out(n);
    double level = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        level += e[t];
        out[t] = level;
    }
    return out;
}

inline std::vector<double> uniform(std::size_t n, double lo, double hi, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> out(n);
    for (double& v : out) {
        v = dist(rng);
    }
    return out;
}

}  // namespace retail::testing
