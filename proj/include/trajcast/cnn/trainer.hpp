#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "trajcast/cnn/adam.hpp"
#include "trajcast/cnn/network.hpp"
#include "trajcast/forecast_model.hpp"

namespace trajcast::cnn {

struct TrainingExample {
  Tensor input;
  std::vector<double> target;
};

struct TrainConfig {
  std::size_t epochs = 2000;
  std::size_t batch_size = 3;
  std::uint64_t seed = 0;
  AdamConfig adam;
  // Validation MSE is computed on epochs divisible by this and on the last one.
  std::size_t validation_every = 50;
};

using trajcast::LossRecord;

using LossSink = std::function<void(const LossRecord&)>;

/// Mini-batch Adam on the per-sample MSE. Each epoch reshuffles the examples
/// with a generator seeded from `config.seed`, averages gradients over each
/// batch and reports the mean batch loss of the epoch to `sink`.
/// Throws std::invalid_argument on an empty training set or batch_size 0.
void train(Network& net, std::span<const TrainingExample> examples, const TrainConfig& config,
           const LossSink& sink = {}, std::span<const TrainingExample> validation = {});

/// Mean per-sample MSE of the network over `examples`.
double evaluate_mse(const Network& net, std::span<const TrainingExample> examples);

/// Gradient of the mean per-sample MSE over `examples` (no update).
std::vector<double> loss_gradient(const Network& net, std::span<const TrainingExample> examples);

}  // namespace trajcast::cnn
