#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "trajcast/trajectory.hpp"

namespace trajcast {

/// One supervised example: an observed window and the steps to forecast.
struct WindowSample {
  std::vector<Point2> past;
  std::vector<Point2> target;
};

/// past = first alpha points, target = the full horizon.
std::vector<WindowSample> joint_samples(const TrajectoryDataset& dataset);

/// past = first alpha points, target = horizon steps [start, start + length).
std::vector<WindowSample> segment_samples(const TrajectoryDataset& dataset, std::size_t start,
                                          std::size_t length);

/// Every alpha-length window inside each sequence paired with the next point.
std::vector<WindowSample> one_step_samples(const TrajectoryDataset& dataset);

/// One row of a learning curve.
struct LossRecord {
  std::size_t epoch = 0;  // 1-based
  double train_mse = 0.0;
  std::optional<double> val_mse;

  friend bool operator==(const LossRecord&, const LossRecord&) = default;
};

/// Interleaved layout [x0, y0, x1, y1, ...].
std::vector<double> flatten(std::span<const Point2> points);
std::vector<Point2> unflatten(std::span<const double> values);

/// Uniform fit/predict contract shared by every forecaster.
///
/// A model is fitted on samples whose targets all have the same number of
/// steps; that number becomes output_steps(). After fitting, predict() is
/// deterministic and always returns output_steps() points.
class ForecastModel {
 public:
  virtual ~ForecastModel() = default;

  virtual std::string kind() const = 0;

  virtual void fit_samples(std::span<const WindowSample> samples) = 0;

  /// Fits on the joint (full-horizon) samples of `train`.
  void fit(const TrajectoryDataset& train) { fit_samples(joint_samples(train)); }

  virtual std::vector<Point2> predict(std::span<const Point2> past) const = 0;

  virtual std::size_t input_steps() const = 0;
  virtual std::size_t output_steps() const = 0;

  /// Kind, hyperparameters and fitted parameters.
  virtual nlohmann::json to_json() const = 0;

  /// A fresh, unfitted model with the same hyperparameters.
  virtual std::unique_ptr<ForecastModel> clone_unfitted() const = 0;

  /// Held-out samples for learning curves; ignored by closed-form models.
  virtual void set_validation(std::vector<WindowSample> /*samples*/) {}

  /// Learning curve of the last fit; empty for closed-form models.
  virtual std::vector<LossRecord> loss_log() const { return {}; }
};

using ModelFactory = std::function<std::unique_ptr<ForecastModel>()>;

/// Checks that every sample has `past` of equal length and targets of equal,
/// non-zero length; returns {input_steps, output_steps}.
std::pair<std::size_t, std::size_t> sample_shape(std::span<const WindowSample> samples);

}  // namespace trajcast
