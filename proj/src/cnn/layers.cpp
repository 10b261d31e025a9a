#include "trajcast/cnn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace trajcast::cnn {

Tensor Tensor::from_points(std::span<const Point2> points) {
  Tensor t(2, points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    t.at(0, i) = points[i].x;
    t.at(1, i) = points[i].y;
  }
  return t;
}

bool Tensor::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

namespace {

void check_conv(const Tensor& input, const ConvLayer& layer) {
  if (input.channels() != layer.in_channels) {
    throw std::invalid_argument("conv1d: input has " + std::to_string(input.channels()) +
                                " channels, layer expects " + std::to_string(layer.in_channels));
  }
  if (layer.kernel_size == 0) throw std::invalid_argument("conv1d: kernel_size must be positive");
  if (layer.weights.size() != layer.weight_count() || layer.bias.size() != layer.out_channels) {
    throw std::invalid_argument("conv1d: parameter spans do not match the layer shape");
  }
}

// For tap k the input index is i + k - offset; returns the valid i range.
struct TapRange {
  std::size_t begin;
  std::size_t end;
  std::ptrdiff_t shift;
};

TapRange tap_range(std::size_t k, std::size_t offset, std::size_t length) {
  const auto shift = static_cast<std::ptrdiff_t>(k) - static_cast<std::ptrdiff_t>(offset);
  const auto len = static_cast<std::ptrdiff_t>(length);
  const std::ptrdiff_t begin = std::max<std::ptrdiff_t>(0, -shift);
  const std::ptrdiff_t end = std::min<std::ptrdiff_t>(len, len - shift);
  if (end <= begin) return {0, 0, shift};
  return {static_cast<std::size_t>(begin), static_cast<std::size_t>(end), shift};
}

std::size_t pad_offset(std::size_t kernel_size, Padding padding) {
  return padding == Padding::centered ? (kernel_size - 1) / 2 : 0;
}

}  // namespace

Tensor conv1d_forward(const Tensor& input, const ConvLayer& layer, Padding padding) {
  check_conv(input, layer);
  const std::size_t len = input.length();
  const std::size_t kz = layer.kernel_size;
  const std::size_t offset = pad_offset(kz, padding);
  Tensor out(layer.out_channels, len);
  for (std::size_t o = 0; o < layer.out_channels; ++o) {
    auto dst = out.channel(o);
    std::fill(dst.begin(), dst.end(), layer.bias[o]);
    for (std::size_t c = 0; c < layer.in_channels; ++c) {
      const auto src = input.channel(c);
      const double* w = layer.weights.data() + (o * layer.in_channels + c) * kz;
      for (std::size_t k = 0; k < kz; ++k) {
        const auto r = tap_range(k, offset, len);
        const double wk = w[k];
        for (std::size_t i = r.begin; i < r.end; ++i) {
          dst[i] += wk * src[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + r.shift)];
        }
      }
    }
  }
  return out;
}

void conv1d_backward(const Tensor& input, const ConvLayer& layer, const Tensor& grad_output,
                     std::span<double> grad_weights, std::span<double> grad_bias, Tensor* grad_input,
                     Padding padding) {
  check_conv(input, layer);
  const std::size_t len = input.length();
  const std::size_t kz = layer.kernel_size;
  const std::size_t offset = pad_offset(kz, padding);
  if (grad_input != nullptr) *grad_input = Tensor(input.channels(), len);
  for (std::size_t o = 0; o < layer.out_channels; ++o) {
    const auto g = grad_output.channel(o);
    double bias_sum = 0.0;
    for (double v : g) bias_sum += v;
    grad_bias[o] += bias_sum;
    for (std::size_t c = 0; c < layer.in_channels; ++c) {
      const auto src = input.channel(c);
      const std::size_t base = (o * layer.in_channels + c) * kz;
      for (std::size_t k = 0; k < kz; ++k) {
        const auto r = tap_range(k, offset, len);
        double acc = 0.0;
        for (std::size_t i = r.begin; i < r.end; ++i) {
          acc += g[i] * src[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + r.shift)];
        }
        grad_weights[base + k] += acc;
        if (grad_input != nullptr) {
          auto dst = grad_input->channel(c);
          const double wk = layer.weights[base + k];
          for (std::size_t i = r.begin; i < r.end; ++i) {
            dst[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + r.shift)] += wk * g[i];
          }
        }
      }
    }
  }
}

PoolResult global_max_pool(const Tensor& input) {
  if (input.length() == 0) throw std::invalid_argument("global_max_pool: empty input");
  PoolResult r;
  r.values.resize(input.channels());
  r.argmax.resize(input.channels());
  for (std::size_t c = 0; c < input.channels(); ++c) {
    const auto ch = input.channel(c);
    std::size_t best = 0;
    for (std::size_t i = 1; i < ch.size(); ++i) {
      if (ch[i] > ch[best]) best = i;
    }
    r.values[c] = ch[best];
    r.argmax[c] = best;
  }
  return r;
}

std::vector<double> dense_forward(std::span<const double> input, const DenseLayer& layer) {
  if (input.size() != layer.in_dim) {
    throw std::invalid_argument("dense: input has " + std::to_string(input.size()) + " values, layer expects " +
                                std::to_string(layer.in_dim));
  }
  std::vector<double> out(layer.bias.begin(), layer.bias.end());
  for (std::size_t o = 0; o < layer.out_dim; ++o) {
    const double* w = layer.weights.data() + o * layer.in_dim;
    double acc = 0.0;
    for (std::size_t i = 0; i < layer.in_dim; ++i) acc += w[i] * input[i];
    out[o] += acc;
  }
  return out;
}

void dense_backward(std::span<const double> input, const DenseLayer& layer, std::span<const double> grad_output,
                    std::span<double> grad_weights, std::span<double> grad_bias, std::span<double> grad_input) {
  if (!grad_input.empty()) std::fill(grad_input.begin(), grad_input.end(), 0.0);
  for (std::size_t o = 0; o < layer.out_dim; ++o) {
    const double g = grad_output[o];
    grad_bias[o] += g;
    if (g == 0.0) continue;
    double* gw = grad_weights.data() + o * layer.in_dim;
    for (std::size_t i = 0; i < layer.in_dim; ++i) gw[i] += g * input[i];
    if (!grad_input.empty()) {
      const double* w = layer.weights.data() + o * layer.in_dim;
      for (std::size_t i = 0; i < layer.in_dim; ++i) grad_input[i] += w[i] * g;
    }
  }
}

}  // namespace trajcast::cnn
