#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "trajcast/cnn/tensor.hpp"

namespace trajcast::cnn {

/// Where the kernel_size - 1 zeros go so the output keeps the input length.
/// `right` reads out[i] = sum_k w[k] * in[i + k] (zeros past the end);
/// `centered` shifts the window back by (kernel_size - 1) / 2.
enum class Padding { right, centered };

/// Non-owning view of a convolution's parameters.
/// weights: out_channels x in_channels x kernel_size, row-major.
struct ConvLayer {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel_size = 0;
  std::span<const double> weights;
  std::span<const double> bias;

  std::size_t weight_count() const { return out_channels * in_channels * kernel_size; }
};

/// Non-owning view of a fully connected layer; weights are out_dim x in_dim.
struct DenseLayer {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  std::span<const double> weights;
  std::span<const double> bias;
};

/// Same-length convolution summed over input channels, plus bias.
Tensor conv1d_forward(const Tensor& input, const ConvLayer& layer, Padding padding = Padding::right);

/// Accumulates parameter gradients into grad_weights / grad_bias and, when
/// grad_input is non-null, overwrites it with the gradient w.r.t. the input.
void conv1d_backward(const Tensor& input, const ConvLayer& layer, const Tensor& grad_output,
                     std::span<double> grad_weights, std::span<double> grad_bias, Tensor* grad_input,
                     Padding padding = Padding::right);

struct PoolResult {
  std::vector<double> values;
  // First index of the maximum in each channel.
  std::vector<std::size_t> argmax;
};

PoolResult global_max_pool(const Tensor& input);

std::vector<double> dense_forward(std::span<const double> input, const DenseLayer& layer);

/// Accumulates parameter gradients; writes the input gradient when grad_input
/// is non-empty.
void dense_backward(std::span<const double> input, const DenseLayer& layer, std::span<const double> grad_output,
                    std::span<double> grad_weights, std::span<double> grad_bias, std::span<double> grad_input);

}  // namespace trajcast::cnn
