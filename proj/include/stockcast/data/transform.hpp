#pragma once

#include "stockcast/data/series.hpp"

#include <span>
#include <utility>

namespace stockcast::data {

/// Reindexes the series onto `calendar`. A calendar day with no bar takes the
/// OHLC of the most recent earlier bar and zero volume. Bars on days outside
/// the calendar are dropped but still serve as fill sources.
[[nodiscard]] PriceSeries align_calendar(const PriceSeries& series, std::span<const Date> calendar);

/// Number of calendar days that align_calendar would fill.
[[nodiscard]] std::size_t count_missing(const PriceSeries& series, std::span<const Date> calendar);

/// train holds bars dated <= split_date, test the rest. Both are nonempty.
[[nodiscard]] std::pair<PriceSeries, PriceSeries> split_train_test(const PriceSeries& series,
                                                                   Date split_date);

[[nodiscard]] PriceSeries concat(const PriceSeries& head, const PriceSeries& tail);

[[nodiscard]] ReturnSeries returns(const PriceSeries& series, ReturnKind kind);

}  // namespace stockcast::data
