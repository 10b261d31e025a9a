#pragma once

#include <filesystem>
#include <memory>

#include "json.hpp"

#include "trajcast/forecast_model.hpp"

namespace trajcast {

/// Rebuilds any model from the JSON its to_json() produced, dispatching on
/// the "kind" field.
std::unique_ptr<ForecastModel> model_from_json(const nlohmann::json& j);

void save_model(const ForecastModel& model, const std::filesystem::path& path);
std::unique_ptr<ForecastModel> load_model(const std::filesystem::path& path);

}  // namespace trajcast
