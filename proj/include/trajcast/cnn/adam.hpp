#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace trajcast::cnn {

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t t = 0;

  AdamState() = default;
  AdamState(std::size_t parameter_count, AdamConfig cfg)
      : config(cfg), m(parameter_count, 0.0), v(parameter_count, 0.0) {}
};

using ParameterNamer = std::function<std::string(std::size_t)>;

/// One bias-corrected Adam update. All gradients are checked before any
/// parameter moves; a non-finite gradient throws std::invalid_argument naming
/// the parameter (via `namer` when given).
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               const ParameterNamer& namer = {});

}  // namespace trajcast::cnn
