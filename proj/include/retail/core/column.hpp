#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace retail {

/// Real-valued column with an explicit presence mask. A missing entry's value slot is unspecified.
struct NullableColumn {
    std::vector<double> values;
    std::vector<std::uint8_t> present;

    NullableColumn() = default;
    explicit NullableColumn(std::size_t n) : values(n, 0.0), present(n, 0) {}

    std::size_t size() const noexcept { return values.size(); }
    bool has(std::size_t i) const { return present[i] != 0; }
    std::optional<double> get(std::size_t i) const {
        return has(i) ? std::optional<double>(values[i]) : std::nullopt;
    }
    void set(std::size_t i, double v) {
        values[i] = v;
        present[i] = 1;
    }
    void set(std::size_t i, std::optional<double> v) {
        if (v) {
            set(i, *v);
        } else {
            values[i] = 0.0;
            present[i] = 0;
        }
    }
    void push_back(std::optional<double> v) {
        values.push_back(v.value_or(0.0));
        present.push_back(v ? 1 : 0);
    }
};

enum class ColumnKind { numeric, categorical };

/// Named model input. Categorical values are non-negative integer ids stored as doubles.
struct FeatureColumn {
    std::string name;
    ColumnKind kind = ColumnKind::numeric;
    NullableColumn values;
};

}  // namespace retail
