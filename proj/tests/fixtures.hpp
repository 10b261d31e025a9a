#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "trajcast/cnn/network.hpp"
#include "trajcast/cnn/trainer.hpp"

namespace fixtures {

struct GradientCase {
  trajcast::cnn::Network net;
  trajcast::cnn::Tensor input;
  std::vector<double> target;
};

/// Two convolutions of three filters over a length-8, two-channel input,
/// parameters and data drawn uniformly from [-0.5, 0.5].
inline GradientCase tiny_gradient_case(std::uint64_t seed, bool relu = false,
                                       trajcast::cnn::Padding padding = trajcast::cnn::Padding::right) {
  trajcast::cnn::NetworkSpec spec;
  spec.input_channels = 2;
  spec.input_length = 8;
  spec.conv_filters = {3, 3};
  spec.kernel_size = 3;
  spec.dense_dims = {6, 5};
  spec.heads = 2;
  spec.padding = padding;
  spec.relu = relu;
  GradientCase c{trajcast::cnn::Network(spec, seed), trajcast::cnn::Tensor(2, 8), std::vector<double>(4)};
  std::mt19937_64 rng(seed * 7919 + 1);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (auto& p : c.net.parameters()) p = u(rng);
  for (auto& v : c.input.values()) v = u(rng);
  for (auto& t : c.target) t = u(rng);
  return c;
}

struct GradientCheck {
  double worst_relative_error = 0.0;
  std::size_t worst_index = 0;
  std::size_t parameters = 0;
};

/// Relative error |a - n| / max(|a|, |n|, floor) between the analytic gradient
/// and central differences with step 1e-5. The floor keeps parameters with a
/// vanishing gradient from dividing roundoff by zero.
inline GradientCheck check_gradients(const GradientCase& c, double floor = 1e-7) {
  const std::vector<trajcast::cnn::TrainingExample> ex{{c.input, c.target}};
  const auto analytic = trajcast::cnn::loss_gradient(c.net, ex);
  const std::vector<double> params(c.net.parameters().begin(), c.net.parameters().end());
  const auto numeric = oracle::finite_difference(
      params, [&](std::span<const double> p) { return oracle::network_loss(c.net, p, c.input, c.target); }, 1e-5);
  GradientCheck out;
  out.parameters = params.size();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric[i]), floor});
    const double rel = std::abs(analytic[i] - numeric[i]) / denom;
    if (rel > out.worst_relative_error) {
      out.worst_relative_error = rel;
      out.worst_index = i;
    }
  }
  return out;
}

}  // namespace fixtures

#include "trajcast/mil.hpp"

namespace fixtures {

/// Frames of a bag stream separable on feature 0: every positive bag holds one
/// instance with x0 in [0.6, 1] among instances with x0 in [0, 0.4]; negative
/// bags are single instances with x0 in [0, 0.4]. Other features are noise.
inline std::vector<trajcast::mil::FrameBags> separable_stream(std::uint64_t seed, std::size_t frames,
                                                             std::size_t dims = 4, std::size_t bag_size = 4,
                                                             std::size_t negatives = 6) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0), low(0.0, 0.4), high(0.6, 1.0);
  auto instance = [&](bool positive) {
    trajcast::mil::Instance x(dims);
    for (auto& v : x) v = u(rng);
    x[0] = positive ? high(rng) : low(rng);
    return x;
  };
  std::vector<trajcast::mil::FrameBags> out(frames);
  for (auto& f : out) {
    f.positive.label = 1;
    const std::size_t hit = rng() % bag_size;
    for (std::size_t i = 0; i < bag_size; ++i) f.positive.instances.push_back(instance(i == hit));
    for (std::size_t n = 0; n < negatives; ++n) f.negatives.push_back({{instance(false)}, 0});
  }
  return out;
}

inline std::vector<trajcast::mil::Bag> all_bags(const std::vector<trajcast::mil::FrameBags>& frames) {
  std::vector<trajcast::mil::Bag> bags;
  for (const auto& f : frames) {
    bags.push_back(f.positive);
    bags.insert(bags.end(), f.negatives.begin(), f.negatives.end());
  }
  return bags;
}

}  // namespace fixtures
