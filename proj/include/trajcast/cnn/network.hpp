#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "trajcast/cnn/layers.hpp"

namespace trajcast::cnn {

/// Architecture: a stack of same-length convolutions, global max pooling, a
/// stack of dense layers, then `heads` output heads of two values (x, y) each.
struct NetworkSpec {
  std::size_t input_channels = 2;
  std::size_t input_length = 25;
  std::vector<std::size_t> conv_filters{8, 16, 32};
  std::size_t kernel_size = 3;
  std::vector<std::size_t> dense_dims{256, 128, 64};
  std::size_t heads = 25;
  Padding padding = Padding::right;
  // Off: every layer is linear and max pooling is the only nonlinearity.
  bool relu = false;

  /// Seven convolutions with 24 ... 1024 filters.
  static NetworkSpec full_scale(std::size_t input_length, std::size_t heads);
  /// Three convolutions with 8, 16, 32 filters; finishes in minutes on a CPU.
  static NetworkSpec desk_scale(std::size_t input_length, std::size_t heads);

  std::size_t output_size() const { return 2 * heads; }
  void validate() const;

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

void to_json(nlohmann::json& j, const NetworkSpec& spec);
void from_json(const nlohmann::json& j, NetworkSpec& spec);

/// Activations kept from a forward pass for the backward pass.
struct ForwardTrace {
  std::vector<Tensor> conv_inputs;       // input of each conv layer
  std::vector<Tensor> conv_outputs;      // after the optional ReLU
  std::vector<std::size_t> pool_argmax;  // per channel of the last conv output
  std::vector<std::vector<double>> dense_inputs;  // input of each dense layer, heads last
  std::vector<std::vector<double>> dense_outputs;
};

/// All parameters live in one flat buffer, layer by layer (conv layers, then
/// dense layers, then the output heads), weights before bias, row-major.
class Network {
 public:
  Network() = default;
  /// Glorot-uniform weights from `seed`, zero biases.
  Network(NetworkSpec spec, std::uint64_t seed);

  const NetworkSpec& spec() const { return spec_; }

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }
  std::size_t parameter_count() const { return params_.size(); }
  /// Human-readable location, e.g. "conv0.weight[12]".
  std::string parameter_name(std::size_t index) const;

  std::size_t conv_count() const { return conv_offsets_.size(); }
  std::size_t dense_count() const { return dense_offsets_.size() - 1; }
  ConvLayer conv_layer(std::size_t l) const;
  /// Dense layers followed by the output head layer (index dense_count()).
  DenseLayer dense_layer(std::size_t l) const;

  std::vector<double> forward(const Tensor& input) const;
  std::vector<double> forward(const Tensor& input, ForwardTrace& trace) const;

  /// Adds d(loss)/d(params) to `grads` given d(loss)/d(output).
  void backward(const ForwardTrace& trace, std::span<const double> grad_output, std::span<double> grads) const;

  /// Pre-pool activations of the last convolution.
  Tensor encode(const Tensor& input) const;

  nlohmann::json to_json() const;
  static Network from_json(const nlohmann::json& j);

 private:
  struct Block {
    std::size_t weight_offset;
    std::size_t bias_offset;
  };

  void layout();
  void check_input(const Tensor& input) const;

  NetworkSpec spec_;
  std::vector<double> params_;
  std::vector<Block> conv_offsets_;
  std::vector<Block> dense_offsets_;  // hidden dense layers, then the heads
};

/// Per-sample loss: mean of squared errors over all outputs.
double mse_loss(std::span<const double> output, std::span<const double> target);

}  // namespace trajcast::cnn
