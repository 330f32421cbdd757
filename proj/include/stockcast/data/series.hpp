#pragma once

#include "stockcast/date.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace stockcast::data {

struct Bar {
    Date date;
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;
    std::int64_t volume = 0;

    friend bool operator==(const Bar&, const Bar&) = default;
};

/// Empty when the bar is consistent, otherwise a short description of the
/// first violated invariant.
[[nodiscard]] std::optional<std::string> bar_violation(const Bar& bar);

/// Date-ordered OHLCV history for one symbol.
struct PriceSeries {
    std::string symbol;
    std::vector<Bar> bars;

    [[nodiscard]] std::size_t size() const { return bars.size(); }
    [[nodiscard]] bool empty() const { return bars.empty(); }
    [[nodiscard]] std::vector<double> closes() const;
    [[nodiscard]] std::vector<Date> dates() const;

    friend bool operator==(const PriceSeries&, const PriceSeries&) = default;
};

/// Throws Validation if dates are not strictly increasing or any bar is
/// inconsistent.
void validate(const PriceSeries& series);

enum class ReturnKind { Simple, Log };

struct ReturnSeries {
    std::string symbol;
    ReturnKind kind = ReturnKind::Simple;
    std::vector<Date> dates;     ///< date of the later close in each pair
    std::vector<double> values;
};

/// A derived per-bar column. values[i] belongs to bar index offset + i;
/// bars before offset are warm-up and have no value.
struct FeatureColumn {
    std::string name;
    std::size_t offset = 0;
    std::vector<double> values;

    [[nodiscard]] bool defined_at(std::size_t bar) const {
        return bar >= offset && bar - offset < values.size();
    }
    [[nodiscard]] double at(std::size_t bar) const { return values.at(bar - offset); }
};

struct FeatureMatrix {
    std::vector<Date> dates;
    std::vector<std::string> feature_names;
    std::vector<std::vector<double>> rows;
    std::vector<double> labels;

    [[nodiscard]] std::size_t size() const { return rows.size(); }
};

}  // namespace stockcast::data
