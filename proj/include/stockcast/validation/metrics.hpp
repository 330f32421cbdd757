#pragma once

#include <nlohmann/json_fwd.hpp>

#include <cstddef>
#include <optional>
#include <span>

namespace stockcast::validation {

struct FoldResult;

/// Percentages for the ratio metrics. mape is empty when an actual is zero,
/// rmse_over_mean when the mean actual is zero.
struct MetricReport {
    double rmse = 0.0;
    double mae = 0.0;
    std::optional<double> mape;
    std::optional<double> rmse_over_mean;
    std::size_t n = 0;
};

/// Throws Shape on a length mismatch or empty input.
[[nodiscard]] MetricReport evaluate(std::span<const double> predictions,
                                    std::span<const double> actuals);

/// Pools every fold's predictions before computing the metrics.
[[nodiscard]] MetricReport evaluate(std::span<const FoldResult> folds);

/// rmse, mae, mape, rmse_over_mean (null when undefined), n.
void to_json(nlohmann::json& j, const MetricReport& report);

}  // namespace stockcast::validation
