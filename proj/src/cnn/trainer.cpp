#include "trajcast/cnn/trainer.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

namespace trajcast::cnn {
namespace {

// Adds the gradient of weight * mse(output, target) and returns the loss.
double accumulate(const Network& net, const TrainingExample& ex, double weight, ForwardTrace& trace,
                  std::vector<double>& grad_output, std::span<double> grads) {
  const auto out = net.forward(ex.input, trace);
  if (out.size() != ex.target.size()) throw std::invalid_argument("training target has the wrong size");
  const double scale = 2.0 * weight / static_cast<double>(out.size());
  grad_output.resize(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) grad_output[i] = scale * (out[i] - ex.target[i]);
  net.backward(trace, grad_output, grads);
  return mse_loss(out, ex.target);
}

}  // namespace

double evaluate_mse(const Network& net, std::span<const TrainingExample> examples) {
  if (examples.empty()) throw std::invalid_argument("evaluate_mse: no examples");
  double total = 0.0;
  for (const auto& ex : examples) total += mse_loss(net.forward(ex.input), ex.target);
  return total / static_cast<double>(examples.size());
}

std::vector<double> loss_gradient(const Network& net, std::span<const TrainingExample> examples) {
  if (examples.empty()) throw std::invalid_argument("loss_gradient: no examples");
  std::vector<double> grads(net.parameter_count(), 0.0);
  ForwardTrace trace;
  std::vector<double> grad_output;
  const double weight = 1.0 / static_cast<double>(examples.size());
  for (const auto& ex : examples) accumulate(net, ex, weight, trace, grad_output, grads);
  return grads;
}

void train(Network& net, std::span<const TrainingExample> examples, const TrainConfig& config, const LossSink& sink,
           std::span<const TrainingExample> validation) {
  if (examples.empty()) throw std::invalid_argument("train: empty training set");
  if (config.batch_size == 0) throw std::invalid_argument("train: batch_size must be >= 1");

  AdamState state(net.parameter_count(), config.adam);
  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> grads(net.parameter_count());
  std::vector<double> grad_output;
  ForwardTrace trace;
  const ParameterNamer namer = [&net](std::size_t i) { return net.parameter_name(i); };

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const double weight = 1.0 / static_cast<double>(end - start);
      std::fill(grads.begin(), grads.end(), 0.0);
      for (std::size_t b = start; b < end; ++b) {
        loss_sum += accumulate(net, examples[order[b]], weight, trace, grad_output, grads);
      }
      adam_step(net.parameters(), grads, state, namer);
    }
    if (!sink) continue;
    LossRecord record{epoch, loss_sum / static_cast<double>(examples.size()), std::nullopt};
    const bool validate = !validation.empty() && config.validation_every > 0 &&
                          (epoch % config.validation_every == 0 || epoch == config.epochs);
    if (validate) record.val_mse = evaluate_mse(net, validation);
    sink(record);
  }
}

}  // namespace trajcast::cnn
