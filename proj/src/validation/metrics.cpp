#include "stockcast/validation/metrics.hpp"

#include "stockcast/error.hpp"
#include "stockcast/validation/walk_forward.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <string>
#include <vector>

namespace stockcast::validation {

MetricReport evaluate(std::span<const double> predictions, std::span<const double> actuals) {
    if (predictions.size() != actuals.size()) {
        throw Error(ErrorKind::Shape, "evaluate: " + std::to_string(predictions.size()) +
                                          " predictions vs " + std::to_string(actuals.size()) +
                                          " actuals");
    }
    if (actuals.empty()) {
        throw Error(ErrorKind::Shape, "evaluate: no observations");
    }
    const auto n = static_cast<double>(actuals.size());
    double sq = 0.0;
    double abs_sum = 0.0;
    double pct_sum = 0.0;
    double actual_sum = 0.0;
    bool zero_actual = false;
    for (std::size_t i = 0; i < actuals.size(); ++i) {
        const double e = predictions[i] - actuals[i];
        sq += e * e;
        abs_sum += std::abs(e);
        actual_sum += actuals[i];
        if (actuals[i] == 0.0) {
            zero_actual = true;
        } else {
            pct_sum += std::abs(e / actuals[i]);
        }
    }
    MetricReport out;
    out.n = actuals.size();
    out.rmse = std::sqrt(sq / n);
    out.mae = abs_sum / n;
    if (!zero_actual) {
        out.mape = 100.0 * pct_sum / n;
    }
    const double mean = actual_sum / n;
    if (mean != 0.0) {
        out.rmse_over_mean = 100.0 * out.rmse / mean;
    }
    return out;
}

MetricReport evaluate(std::span<const FoldResult> folds) {
    std::vector<double> predictions;
    std::vector<double> actuals;
    for (const auto& fold : folds) {
        predictions.insert(predictions.end(), fold.predictions.begin(), fold.predictions.end());
        actuals.insert(actuals.end(), fold.actuals.begin(), fold.actuals.end());
    }
    return evaluate(predictions, actuals);
}

void to_json(nlohmann::json& j, const MetricReport& report) {
    auto optional_value = [](const std::optional<double>& v) {
        return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    j = nlohmann::json{{"rmse", report.rmse},
                       {"mae", report.mae},
                       {"mape", optional_value(report.mape)},
                       {"rmse_over_mean", optional_value(report.rmse_over_mean)},
                       {"n", report.n}};
}

}  // namespace stockcast::validation
