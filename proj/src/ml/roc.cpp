#include "stockcast/ml/roc.hpp"

#include "stockcast/error.hpp"
#include "stockcast/format.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <string>

namespace stockcast::ml {

namespace {

struct ClassCounts {
    std::size_t positives = 0;
    std::size_t negatives = 0;
};

ClassCounts check_inputs(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) {
        throw Error(ErrorKind::Shape, "scores and labels differ in length");
    }
    ClassCounts c;
    for (int l : labels) {
        if (l != 0 && l != 1) {
            throw Error(ErrorKind::Label, "labels must be 0 or 1, got " + std::to_string(l));
        }
        (l == 1 ? c.positives : c.negatives) += 1;
    }
    if (c.positives == 0 || c.negatives == 0) {
        throw Error(ErrorKind::UndefinedMetric, "AUC needs both classes present");
    }
    return c;
}

std::vector<std::size_t> descending_order(std::span<const double> scores) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return order;
}

}  // namespace

double auc(std::span<const double> scores, std::span<const int> labels) {
    const auto counts = check_inputs(scores, labels);
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    // Ranks are 1-based; a tie block shares its mean rank.
    double positive_rank_sum = 0.0;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        const double mid_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) {
            if (labels[order[k]] == 1) positive_rank_sum += mid_rank;
        }
        i = j;
    }
    const auto np = static_cast<double>(counts.positives);
    const auto nn = static_cast<double>(counts.negatives);
    return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const int> labels) {
    const auto counts = check_inputs(scores, labels);
    const auto order = descending_order(scores);
    std::vector<RocPoint> curve{RocPoint{}};
    std::size_t tp = 0;
    std::size_t fp = 0;
    for (std::size_t i = 0; i < order.size();) {
        const double threshold = scores[order[i]];
        while (i < order.size() && scores[order[i]] == threshold) {
            (labels[order[i]] == 1 ? tp : fp) += 1;
            ++i;
        }
        curve.push_back({threshold, static_cast<double>(tp) / static_cast<double>(counts.positives),
                         static_cast<double>(fp) / static_cast<double>(counts.negatives)});
    }
    return curve;
}

double trapezoid_area(std::span<const RocPoint> curve) {
    double area = 0.0;
    for (std::size_t i = 1; i < curve.size(); ++i) {
        area += (curve[i].fpr - curve[i - 1].fpr) * (curve[i].tpr + curve[i - 1].tpr) / 2.0;
    }
    return area;
}

void write_roc_csv(std::ostream& out, std::span<const RocPoint> curve) {
    out << "threshold,tpr,fpr\n";
    for (const auto& p : curve) {
        out << format_double(p.threshold) << ',' << format_double(p.tpr) << ','
            << format_double(p.fpr) << '\n';
    }
}

}  // namespace stockcast::ml
