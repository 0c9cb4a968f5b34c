#include "retail/core/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace retail {

namespace {

double safe_eval(const Objective& f, std::span<const double> x) {
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

}  // namespace

NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0, const NelderMeadOptions& options) {
    const std::size_t dim = x0.size();
    NelderMeadResult result;
    if (dim == 0) {
        result.value = safe_eval(f, x0);
        result.x = std::move(x0);
        result.converged = true;
        return result;
    }

    std::vector<std::vector<double>> simplex(dim + 1, x0);
    for (std::size_t i = 0; i < dim; ++i) {
        simplex[i + 1][i] += options.initial_step;
    }
    std::vector<double> values(dim + 1);
    for (std::size_t i = 0; i <= dim; ++i) {
        values[i] = safe_eval(f, simplex[i]);
    }

    std::vector<std::size_t> order(dim + 1);
    std::vector<double> centroid(dim), trial(dim), trial2(dim);
    auto blend = [&](double t, const std::vector<double>& from, std::vector<double>& out) {
        // out = centroid + t * (from - centroid)
        for (std::size_t j = 0; j < dim; ++j) {
            out[j] = centroid[j] + t * (from[j] - centroid[j]);
        }
    };

    int iter = 0;
    for (; iter < options.max_iterations; ++iter) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second_worst = order[dim - 1];

        const double lo = values[best];
        const double hi = values[worst];
        if (std::isfinite(hi) &&
            2.0 * std::abs(hi - lo) <= options.relative_tolerance * (std::abs(hi) + std::abs(lo)) + 1e-300) {
            result.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= dim; ++i) {
            if (i == worst) {
                continue;
            }
            for (std::size_t j = 0; j < dim; ++j) {
                centroid[j] += simplex[i][j];
            }
        }
        for (double& c : centroid) {
            c /= static_cast<double>(dim);
        }

        blend(-1.0, simplex[worst], trial);
        const double reflected = safe_eval(f, trial);
        if (reflected < values[best]) {
            blend(-2.0, simplex[worst], trial2);
            const double expanded = safe_eval(f, trial2);
            if (expanded < reflected) {
                simplex[worst] = trial2;
                values[worst] = expanded;
            } else {
                simplex[worst] = trial;
                values[worst] = reflected;
            }
            continue;
        }
        if (reflected < values[second_worst]) {
            simplex[worst] = trial;
            values[worst] = reflected;
            continue;
        }
        // Contract toward the better of the worst point and its reflection.
        const bool outside = reflected < values[worst];
        if (outside) {
            blend(-0.5, simplex[worst], trial2);
        } else {
            blend(0.5, simplex[worst], trial2);
        }
        const double contracted = safe_eval(f, trial2);
        if (contracted < std::min(reflected, values[worst])) {
            simplex[worst] = trial2;
            values[worst] = contracted;
            continue;
        }
        for (std::size_t i = 0; i <= dim; ++i) {
            if (i == best) {
                continue;
            }
            for (std::size_t j = 0; j < dim; ++j) {
                simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
            }
            values[i] = safe_eval(f, simplex[i]);
        }
    }

    const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
    result.x = simplex[best];
    result.value = values[best];
    result.iterations = iter;
    return result;
}

}  // namespace retail
