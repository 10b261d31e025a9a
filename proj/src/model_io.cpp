#include "trajcast/model_io.hpp"

#include <fstream>
#include <stdexcept>

#include "trajcast/baselines.hpp"
#include "trajcast/cnn/cnn_forecaster.hpp"
#include "trajcast/linear_model.hpp"
#include "trajcast/regression_tree.hpp"
#include "trajcast/strategies.hpp"

namespace trajcast {

std::unique_ptr<ForecastModel> model_from_json(const nlohmann::json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "mean") return MeanBaseline::from_json(j);
  if (kind == "last_value") return LastValueBaseline::from_json(j);
  if (kind == "linear") return LinearModel::from_json(j);
  if (kind == "tree") return RegressionTree::from_json(j);
  if (kind == "cnn") return cnn::CnnForecaster::from_json(j);
  if (kind == "multistep") return MultiStepForecaster::from_json(j);
  throw std::invalid_argument("unknown model kind '" + kind + "'");
}

void save_model(const ForecastModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << model.to_json().dump(1) << '\n';
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::unique_ptr<ForecastModel> load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace trajcast
