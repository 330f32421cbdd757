#pragma once

#include "stockcast/data/series.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace stockcast::data {

/// Header names for each OHLCV field in an input CSV.
struct CsvSchema {
    std::string date = "Date";
    std::string open = "Open";
    std::string high = "High";
    std::string low = "Low";
    std::string close = "Close";
    std::string volume = "Volume";
};

/// Reads a header-row CSV of daily bars. Rows may appear in any order; the
/// result is sorted by date and validated.
[[nodiscard]] PriceSeries load_csv(const std::filesystem::path& path, const CsvSchema& schema = {},
                                   std::string symbol = {});
[[nodiscard]] PriceSeries read_csv(std::istream& in, const CsvSchema& schema, std::string symbol);

/// One ISO-8601 date per line, ascending. Blank lines are ignored.
[[nodiscard]] std::vector<Date> load_calendar(const std::filesystem::path& path);
[[nodiscard]] std::vector<Date> read_calendar(std::istream& in);

/// Writes Date,Open,High,Low,Close,Volume with round-trip precision.
void write_csv(std::ostream& out, const PriceSeries& series);

}  // namespace stockcast::data
