#include "trajcast/metrics.hpp"

#include <stdexcept>
#include <string>

namespace trajcast {
namespace {

std::size_t check_shapes(const Forecasts& predictions, const Forecasts& truth) {
  if (predictions.size() != truth.size()) {
    throw std::invalid_argument("mse: " + std::to_string(predictions.size()) + " predictions vs " +
                                std::to_string(truth.size()) + " ground-truth sequences");
  }
  if (predictions.empty()) throw std::invalid_argument("mse: no sequences");
  const std::size_t steps = truth.front().size();
  if (steps == 0) throw std::invalid_argument("mse: empty sequences");
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (predictions[i].size() != steps || truth[i].size() != steps) {
      throw std::invalid_argument("mse: sequence " + std::to_string(i) + " has a mismatched length");
    }
  }
  return steps;
}

double block_mse(const Forecasts& predictions, const Forecasts& truth, std::size_t begin, std::size_t end) {
  double sum = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    for (std::size_t t = begin; t < end; ++t) {
      const double dx = predictions[i][t].x - truth[i][t].x;
      const double dy = predictions[i][t].y - truth[i][t].y;
      sum += dx * dx + dy * dy;
    }
  }
  return sum / static_cast<double>(2 * truth.size() * (end - begin));
}

}  // namespace

double mse(const Forecasts& predictions, const Forecasts& truth) {
  const std::size_t steps = check_shapes(predictions, truth);
  return block_mse(predictions, truth, 0, steps);
}

std::vector<double> per_horizon_mse(const Forecasts& predictions, const Forecasts& truth,
                                    std::size_t segment_length) {
  const std::size_t steps = check_shapes(predictions, truth);
  if (segment_length == 0 || steps % segment_length != 0) {
    throw std::invalid_argument("per_horizon_mse: horizon " + std::to_string(steps) +
                                " is not divisible by segment length " + std::to_string(segment_length));
  }
  std::vector<double> out;
  for (std::size_t start = 0; start < steps; start += segment_length) {
    out.push_back(block_mse(predictions, truth, start, start + segment_length));
  }
  return out;
}

}  // namespace trajcast
