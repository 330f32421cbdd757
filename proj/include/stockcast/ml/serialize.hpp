#pragma once

#include "stockcast/ml/model.hpp"

#include <nlohmann/json_fwd.hpp>

namespace stockcast::ml {

/// {"kind", "task", "seed", "hyperparameters", "parameters"}; doubles are
/// written in shortest round-trip form so from_json(to_json(m)) predicts
/// bit-identically.
void to_json(nlohmann::json& j, const FittedModel& model);
void from_json(const nlohmann::json& j, FittedModel& model);

/// Throws Data if the parameter payload does not fit the kind and width.
void validate_model(const FittedModel& model);

}  // namespace stockcast::ml
