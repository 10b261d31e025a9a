#pragma once

#include <optional>

#include "trajcast/cnn/network.hpp"
#include "trajcast/cnn/trainer.hpp"
#include "trajcast/forecast_model.hpp"

namespace trajcast::cnn {

struct CnnOptions {
  // input_length and heads are taken from the training samples at fit time.
  NetworkSpec architecture;
  TrainConfig training;
  std::uint64_t init_seed = 0;
};

void to_json(nlohmann::json& j, const CnnOptions& options);
void from_json(const nlohmann::json& j, CnnOptions& options);

/// The convolutional forecaster behind the ForecastModel contract. The past
/// window becomes a 2 x alpha tensor (x series, y series) and the heads emit
/// the target steps in order.
class CnnForecaster final : public ForecastModel {
 public:
  explicit CnnForecaster(CnnOptions options = {});

  std::string kind() const override { return "cnn"; }
  void fit_samples(std::span<const WindowSample> samples) override;
  std::vector<Point2> predict(std::span<const Point2> past) const override;
  std::size_t input_steps() const override;
  std::size_t output_steps() const override;
  nlohmann::json to_json() const override;
  std::unique_ptr<ForecastModel> clone_unfitted() const override;

  static std::unique_ptr<CnnForecaster> from_json(const nlohmann::json& j);

  /// Samples scored for the validation column of the loss log during fit.
  void set_validation(std::vector<WindowSample> samples) override { validation_ = std::move(samples); }
  std::vector<LossRecord> loss_log() const override { return loss_log_; }

  const CnnOptions& options() const { return options_; }
  const std::optional<Network>& network() const { return network_; }

 private:
  CnnOptions options_;
  std::optional<Network> network_;
  std::vector<LossRecord> loss_log_;
  std::vector<WindowSample> validation_;
};

std::vector<TrainingExample> to_examples(std::span<const WindowSample> samples);

}  // namespace trajcast::cnn
