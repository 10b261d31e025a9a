#pragma once

#include "trajcast/forecast_model.hpp"

namespace trajcast {

/// Repeats the mean of the observed window for every forecast step.
///
/// `per_window` (default) averages the query past itself. `corpus` instead
/// predicts the per-step mean of the training targets, ignoring the query.
class MeanBaseline final : public ForecastModel {
 public:
  enum class Mode { per_window, corpus };

  explicit MeanBaseline(Mode mode = Mode::per_window, std::size_t output_steps = 0)
      : mode_(mode), output_steps_(output_steps) {}

  std::string kind() const override { return "mean"; }
  void fit_samples(std::span<const WindowSample> samples) override;
  std::vector<Point2> predict(std::span<const Point2> past) const override;
  std::size_t input_steps() const override { return input_steps_; }
  std::size_t output_steps() const override { return output_steps_; }
  nlohmann::json to_json() const override;
  std::unique_ptr<ForecastModel> clone_unfitted() const override;

  static std::unique_ptr<MeanBaseline> from_json(const nlohmann::json& j);

  Mode mode() const { return mode_; }

 private:
  Mode mode_;
  std::size_t input_steps_ = 0;
  std::size_t output_steps_;
  std::vector<Point2> corpus_mean_;
};

/// Repeats the last observed point for every forecast step.
class LastValueBaseline final : public ForecastModel {
 public:
  explicit LastValueBaseline(std::size_t output_steps = 0) : output_steps_(output_steps) {}

  std::string kind() const override { return "last_value"; }
  void fit_samples(std::span<const WindowSample> samples) override;
  std::vector<Point2> predict(std::span<const Point2> past) const override;
  std::size_t input_steps() const override { return input_steps_; }
  std::size_t output_steps() const override { return output_steps_; }
  nlohmann::json to_json() const override;
  std::unique_ptr<ForecastModel> clone_unfitted() const override;

  static std::unique_ptr<LastValueBaseline> from_json(const nlohmann::json& j);

 private:
  std::size_t input_steps_ = 0;
  std::size_t output_steps_;
};

/// Free-function forms of the two baselines.
std::vector<Point2> mean_baseline_predict(std::span<const Point2> past, std::size_t steps);
std::vector<Point2> last_value_predict(std::span<const Point2> past, std::size_t steps);

}  // namespace trajcast
