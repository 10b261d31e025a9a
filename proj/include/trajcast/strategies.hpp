#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trajcast/forecast_model.hpp"

namespace trajcast {

enum class Strategy { iterative, joint, independent };

std::string_view to_string(Strategy s);
Strategy strategy_from_string(std::string_view name);

/// How the forecast horizon is covered. For `independent` the horizon is cut
/// into half-open segments [j*s, (j+1)*s) of `segment_length` steps each.
struct HorizonPlan {
  Strategy strategy = Strategy::joint;
  std::size_t alpha = 25;
  std::size_t horizon = 25;
  std::size_t segment_length = 5;

  void validate() const;
  std::size_t model_count() const;
};

/// Applies a one-step model H times, sliding the window over its own output.
std::vector<Point2> iterative_forecast(const ForecastModel& one_step, std::span<const Point2> past,
                                       std::size_t horizon);

/// A single evaluation that must yield exactly `horizon` steps.
std::vector<Point2> joint_forecast(const ForecastModel& model, std::span<const Point2> past, std::size_t horizon);

/// Every model sees the same past; model j supplies segment j.
std::vector<Point2> independent_forecast(std::span<const std::unique_ptr<ForecastModel>> models,
                                         std::span<const Point2> past, std::size_t segment_length,
                                         std::size_t horizon);

/// A ForecastModel assembled from a base model and a HorizonPlan. fit_samples
/// expects full-horizon samples and derives the per-strategy training sets
/// itself (one-step windows, full horizon, or horizon segments).
///
/// With `standardize` on, coordinates are shifted and scaled per axis using
/// statistics of the training samples before reaching the base models, and
/// forecasts are mapped back.
class MultiStepForecaster final : public ForecastModel {
 public:
  MultiStepForecaster(HorizonPlan plan, std::unique_ptr<ForecastModel> prototype, bool standardize = false);

  std::string kind() const override { return "multistep"; }
  void fit_samples(std::span<const WindowSample> samples) override;
  std::vector<Point2> predict(std::span<const Point2> past) const override;
  std::size_t input_steps() const override { return plan_.alpha; }
  std::size_t output_steps() const override { return plan_.horizon; }
  nlohmann::json to_json() const override;
  std::unique_ptr<ForecastModel> clone_unfitted() const override;
  void set_validation(std::vector<WindowSample> samples) override { validation_ = std::move(samples); }
  /// Learning curve of the first sub-model; see sub_model_logs() for all.
  std::vector<LossRecord> loss_log() const override;

  static std::unique_ptr<MultiStepForecaster> from_json(const nlohmann::json& j);

  const HorizonPlan& plan() const { return plan_; }
  const std::vector<std::unique_ptr<ForecastModel>>& models() const { return models_; }
  /// One log per sub-model (a single entry unless the plan is independent).
  std::vector<std::vector<LossRecord>> sub_model_logs() const;
  const std::optional<Standardizer>& standardizer() const { return standardizer_; }

 private:
  HorizonPlan plan_;
  std::unique_ptr<ForecastModel> prototype_;
  bool standardize_;
  std::optional<Standardizer> standardizer_;
  std::vector<std::unique_ptr<ForecastModel>> models_;
  std::vector<WindowSample> validation_;
};

}  // namespace trajcast
