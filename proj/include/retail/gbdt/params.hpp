#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace retail::gbdt {

enum class Objective { poisson, squared };

std::string_view objective_name(Objective objective);
/// Throws InvalidArgument for anything but "poisson" or "squared".
Objective parse_objective(std::string_view name);

/// L2 regularizer in split gains and leaf values.
inline constexpr double kLambda = 1e-3;
/// Per-tree bound on Poisson leaf values (score space).
inline constexpr double kPoissonLeafCap = 10.0;

struct GbdtParams {
    Objective objective = Objective::poisson;
    double learning_rate = 0.001;
    int num_iterations = 1000;
    /// GOSS resampling period in rounds; 0 disables GOSS.
    int bagging_frequency = 1;
    int min_data_in_leaf = 5;
    int max_leaves = 31;
    /// Value bins per numeric feature; the missing bin comes on top.
    int max_bins = 255;
    double goss_a = 0.2;
    double goss_b = 0.1;
    bool enable_efb = true;
    int efb_max_conflict = 0;
    std::uint64_t seed = 42;
    /// Histogram threads; 0 uses every hardware thread. Results do not depend on it.
    unsigned num_threads = 1;
};

/// Throws InvalidArgument when a field is out of range.
void validate(const GbdtParams& params);

}  // namespace retail::gbdt
