#pragma once

#include <cstdint>

#include "trajcast/forecast_model.hpp"

namespace trajcast {

/// Multi-output CART regressor on flattened past coordinates.
///
/// Nodes split on `feature <= threshold` while they hold more than
/// `max_leaf_samples` samples and some split strictly reduces the summed
/// squared error of the target vectors. Candidate thresholds are midpoints
/// between consecutive distinct feature values; equal gains go to the lowest
/// feature index, then the lowest threshold.
class RegressionTree final : public ForecastModel {
 public:
  struct Node {
    // -1 marks a leaf.
    std::int64_t feature = -1;
    double threshold = 0.0;
    std::int64_t left = -1;
    std::int64_t right = -1;
    std::vector<double> value;  // mean target vector (leaves only)
    std::size_t samples = 0;
  };

  explicit RegressionTree(std::size_t max_leaf_samples = 2) : max_leaf_samples_(max_leaf_samples) {}

  std::string kind() const override { return "tree"; }
  void fit_samples(std::span<const WindowSample> samples) override;
  std::vector<Point2> predict(std::span<const Point2> past) const override;
  std::size_t input_steps() const override { return input_steps_; }
  std::size_t output_steps() const override { return output_steps_; }
  /// Nodes are stored in preorder.
  nlohmann::json to_json() const override;
  std::unique_ptr<ForecastModel> clone_unfitted() const override;

  static std::unique_ptr<RegressionTree> from_json(const nlohmann::json& j);

  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t max_leaf_samples() const { return max_leaf_samples_; }
  /// Index of the leaf a flattened input lands in.
  std::size_t leaf_index(std::span<const double> features) const;

 private:
  std::size_t build(std::vector<std::size_t>& rows, const std::vector<std::vector<double>>& x,
                    const std::vector<std::vector<double>>& y);

  std::size_t max_leaf_samples_;
  std::size_t input_steps_ = 0;
  std::size_t output_steps_ = 0;
  std::vector<Node> nodes_;
};

}  // namespace trajcast
