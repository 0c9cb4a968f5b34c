#pragma once

#include <functional>
#include <span>
#include <vector>

namespace retail {

struct NelderMeadOptions {
    int max_iterations = 2000;
    /// Stop when the spread of objective values across the simplex, relative to their
    /// magnitude, falls below this.
    double relative_tolerance = 1e-10;
    /// Edge length of the initial simplex along each coordinate.
    double initial_step = 0.1;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

/// Derivative-free simplex minimization (standard reflection/expansion/contraction/shrink
/// coefficients 1, 2, 0.5, 0.5). Non-finite objective values are treated as +infinity.
NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0, const NelderMeadOptions& options = {});

}  // namespace retail
