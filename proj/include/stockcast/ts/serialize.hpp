#pragma once

#include "stockcast/ts/arima.hpp"
#include "stockcast/ts/smoothing.hpp"

#include <nlohmann/json_fwd.hpp>

#include <variant>

namespace stockcast::ts {

/// Any fitted univariate model; serialised with a "kind" discriminator.
using ForecastModel = std::variant<SesModel, HoltModel, HoltWintersModel, ArimaModel>;

[[nodiscard]] std::vector<double> forecast(const ForecastModel& model, int h);

void to_json(nlohmann::json& j, const ForecastModel& model);
void from_json(const nlohmann::json& j, ForecastModel& model);

}  // namespace stockcast::ts
