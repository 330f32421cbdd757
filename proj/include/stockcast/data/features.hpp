#pragma once

#include "stockcast/data/series.hpp"

#include <optional>
#include <vector>

namespace stockcast::data {

/// Relative strength index from simple trailing averages of daily close
/// changes. Defined from bar `period` onward.
[[nodiscard]] FeatureColumn rsi(const PriceSeries& series, int period = 14);

/// Trailing mean of close. Defined from bar window - 1 onward.
[[nodiscard]] FeatureColumn moving_average(const PriceSeries& series, int window);

enum class Target { NextClose, NextDirection };

struct FeatureConfig {
    bool open = false;
    bool high = false;
    bool low = false;
    bool close = true;
    bool volume = true;
    std::vector<int> return_lags{1, 2, 3, 4, 5};
    std::optional<int> rsi_period = 14;
    std::vector<int> ma_windows{5, 10, 20};

    [[nodiscard]] bool empty() const;
};

/// Feature rows for every bar whose features are all defined and that has a
/// next-day close to label it. Lagged return k at bar t is the simple return
/// ending at bar t - k + 1, so no feature looks past its own bar.
[[nodiscard]] FeatureMatrix build_dataset(const PriceSeries& series, const FeatureConfig& config,
                                          Target target);

}  // namespace stockcast::data
