#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace stockcast::ts {

/// Classical additive decomposition. trend and residual are NaN within half a
/// period of either end; seasonal is defined everywhere.
struct DecompositionResult {
    int period = 0;
    std::vector<double> trend;
    std::vector<double> seasonal;
    std::vector<double> residual;
    std::vector<double> pattern;  ///< one cycle of seasonal terms, phase 0 first, sums to 0
    std::size_t first_defined = 0;
    std::size_t last_defined = 0;  ///< one past the last index with a trend value

    [[nodiscard]] bool defined(std::size_t i) const {
        return i >= first_defined && i < last_defined;
    }
};

[[nodiscard]] DecompositionResult decompose(std::span<const double> series, int period);

}  // namespace stockcast::ts
