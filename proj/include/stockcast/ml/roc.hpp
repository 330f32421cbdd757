#pragma once

#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

namespace stockcast::ml {

struct RocPoint {
    double threshold = std::numeric_limits<double>::infinity();
    double tpr = 0.0;
    double fpr = 0.0;
};

/// Mann-Whitney AUC with tied scores counted as half. Labels are 0 or 1;
/// throws UndefinedMetric unless both classes are present.
[[nodiscard]] double auc(std::span<const double> scores, std::span<const int> labels);

/// Starts at (0, 0) with threshold +inf, then one point per distinct score in
/// descending order; a row is positive when its score >= the threshold.
[[nodiscard]] std::vector<RocPoint> roc_curve(std::span<const double> scores,
                                              std::span<const int> labels);

[[nodiscard]] double trapezoid_area(std::span<const RocPoint> curve);

void write_roc_csv(std::ostream& out, std::span<const RocPoint> curve);

}  // namespace stockcast::ml
