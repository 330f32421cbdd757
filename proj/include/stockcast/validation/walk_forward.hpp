#pragma once

#include "stockcast/date.hpp"

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace stockcast::data {
struct PriceSeries;
}

namespace stockcast::validation {

/// Rolling mode grows the training window from bar 0; sliding mode keeps it
/// at train_size bars and drops the oldest.
enum class WindowMode { Rolling, Sliding };

[[nodiscard]] std::string to_string(WindowMode mode);
[[nodiscard]] std::optional<WindowMode> parse_window_mode(std::string_view text);

struct WindowSpec {
    WindowMode mode = WindowMode::Sliding;
    std::size_t train_size = 1000;
    std::size_t test_size = 1;
    std::size_t step = 1;

    /// Throws Parameter unless train_size >= 2, test_size >= 1, step >= 1.
    void validate() const;
};

/// Half-open index windows of one fold. test_begin == train_end always.
struct FoldWindow {
    std::size_t fold_index = 0;
    std::size_t train_begin = 0;
    std::size_t train_end = 0;
    std::size_t test_begin = 0;
    std::size_t test_end = 0;
    bool partial = false;  ///< test window shorter than test_size

    friend bool operator==(const FoldWindow&, const FoldWindow&) = default;
};

/// Every fold whose test window is non-empty, in order. Throws
/// InsufficientData if n < train_size + test_size.
[[nodiscard]] std::vector<FoldWindow> fold_windows(std::size_t n, const WindowSpec& spec);

struct FoldResult {
    FoldWindow window;
    Date train_first;
    Date train_last;
    Date test_first;
    Date test_last;
    std::vector<double> predictions;
    std::vector<double> actuals;
};

/// Fits on the training slice and returns exactly `horizon` forecasts.
using Forecaster = std::function<std::vector<double>(std::span<const double> train, int horizon)>;

/// Runs the forecaster on every fold. With threads > 1 folds run
/// concurrently; results and the first error are reported in fold order.
[[nodiscard]] std::vector<FoldResult> walk_forward(std::span<const double> values,
                                                   std::span<const Date> dates,
                                                   const WindowSpec& spec,
                                                   const Forecaster& forecaster,
                                                   unsigned threads = 1);

[[nodiscard]] std::vector<FoldResult> walk_forward(const data::PriceSeries& series,
                                                   const WindowSpec& spec,
                                                   const Forecaster& forecaster,
                                                   unsigned threads = 1);

/// One row per fold: index, date spans, partial flag, and the fold's metrics.
void write_folds_csv(std::ostream& out, std::span<const FoldResult> folds);

}  // namespace stockcast::validation
