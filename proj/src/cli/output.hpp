#pragma once

#include <nlohmann/json_fwd.hpp>

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace stockcast::cli {

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never see a partial file. Creates parent directories.
void write_atomic(const std::filesystem::path& path,
                  const std::function<void(std::ostream&)>& writer);

/// Two-space indented, keys sorted, trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& value);

struct ChartSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color;
    bool points = false;  ///< markers instead of a polyline
};

/// Self-contained SVG with axes, tick labels, title and legend. Non-finite
/// points are skipped and break the line.
[[nodiscard]] std::string svg_chart(const std::string& title, const std::string& x_label,
                                    const std::string& y_label,
                                    const std::vector<ChartSeries>& series);

}  // namespace stockcast::cli
