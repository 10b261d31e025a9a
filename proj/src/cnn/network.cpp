#include "trajcast/cnn/network.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace trajcast::cnn {

NetworkSpec NetworkSpec::full_scale(std::size_t input_length, std::size_t heads) {
  NetworkSpec s;
  s.input_length = input_length;
  s.heads = heads;
  s.conv_filters = {24, 32, 64, 128, 256, 512, 1024};
  return s;
}

NetworkSpec NetworkSpec::desk_scale(std::size_t input_length, std::size_t heads) {
  NetworkSpec s;
  s.input_length = input_length;
  s.heads = heads;
  return s;
}

void NetworkSpec::validate() const {
  if (input_channels == 0 || input_length == 0) throw std::invalid_argument("network: empty input shape");
  if (conv_filters.empty()) throw std::invalid_argument("network: at least one convolution is required");
  if (kernel_size == 0) throw std::invalid_argument("network: kernel_size must be positive");
  if (heads == 0) throw std::invalid_argument("network: at least one output head is required");
  for (auto f : conv_filters) {
    if (f == 0) throw std::invalid_argument("network: conv filter counts must be positive");
  }
  for (auto d : dense_dims) {
    if (d == 0) throw std::invalid_argument("network: dense dims must be positive");
  }
}

void to_json(nlohmann::json& j, const NetworkSpec& s) {
  j = {{"input_channels", s.input_channels},
       {"input_length", s.input_length},
       {"conv_filters", s.conv_filters},
       {"kernel_size", s.kernel_size},
       {"dense_dims", s.dense_dims},
       {"heads", s.heads},
       {"padding", s.padding == Padding::centered ? "centered" : "right"},
       {"relu", s.relu}};
}

void from_json(const nlohmann::json& j, NetworkSpec& s) {
  s.input_channels = j.value("input_channels", s.input_channels);
  s.input_length = j.value("input_length", s.input_length);
  s.conv_filters = j.value("conv_filters", s.conv_filters);
  s.kernel_size = j.value("kernel_size", s.kernel_size);
  s.dense_dims = j.value("dense_dims", s.dense_dims);
  s.heads = j.value("heads", s.heads);
  const auto padding = j.value("padding", std::string("right"));
  if (padding != "right" && padding != "centered") throw std::invalid_argument("unknown padding '" + padding + "'");
  s.padding = padding == "centered" ? Padding::centered : Padding::right;
  s.relu = j.value("relu", s.relu);
}

// ---------------------------------------------------------------------------

Network::Network(NetworkSpec spec, std::uint64_t seed) : spec_(std::move(spec)) {
  spec_.validate();
  layout();
  std::mt19937_64 rng(seed);
  auto glorot = [&](std::size_t offset, std::size_t count, double fan_in, double fan_out) {
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (std::size_t i = 0; i < count; ++i) params_[offset + i] = dist(rng);
  };
  for (std::size_t l = 0; l < conv_offsets_.size(); ++l) {
    const auto layer = conv_layer(l);
    const auto k = static_cast<double>(layer.kernel_size);
    glorot(conv_offsets_[l].weight_offset, layer.weight_count(), static_cast<double>(layer.in_channels) * k,
           static_cast<double>(layer.out_channels) * k);
  }
  for (std::size_t l = 0; l < dense_offsets_.size(); ++l) {
    const auto layer = dense_layer(l);
    glorot(dense_offsets_[l].weight_offset, layer.in_dim * layer.out_dim, static_cast<double>(layer.in_dim),
           static_cast<double>(layer.out_dim));
  }
}

void Network::layout() {
  conv_offsets_.clear();
  dense_offsets_.clear();
  std::size_t offset = 0;
  std::size_t channels = spec_.input_channels;
  for (auto filters : spec_.conv_filters) {
    const std::size_t w = filters * channels * spec_.kernel_size;
    conv_offsets_.push_back({offset, offset + w});
    offset += w + filters;
    channels = filters;
  }
  std::size_t width = channels;
  auto add_dense = [&](std::size_t out) {
    const std::size_t w = out * width;
    dense_offsets_.push_back({offset, offset + w});
    offset += w + out;
    width = out;
  };
  for (auto d : spec_.dense_dims) add_dense(d);
  add_dense(spec_.output_size());
  params_.assign(offset, 0.0);
}

ConvLayer Network::conv_layer(std::size_t l) const {
  const std::size_t in = l == 0 ? spec_.input_channels : spec_.conv_filters[l - 1];
  const std::size_t out = spec_.conv_filters[l];
  const auto& b = conv_offsets_.at(l);
  const std::size_t w = out * in * spec_.kernel_size;
  return {in, out, spec_.kernel_size, std::span<const double>(params_).subspan(b.weight_offset, w),
          std::span<const double>(params_).subspan(b.bias_offset, out)};
}

DenseLayer Network::dense_layer(std::size_t l) const {
  const std::size_t in = l == 0 ? spec_.conv_filters.back()
                                : (l - 1 < spec_.dense_dims.size() ? spec_.dense_dims[l - 1] : 0);
  const std::size_t out = l < spec_.dense_dims.size() ? spec_.dense_dims[l] : spec_.output_size();
  const auto& b = dense_offsets_.at(l);
  return {in, out, std::span<const double>(params_).subspan(b.weight_offset, in * out),
          std::span<const double>(params_).subspan(b.bias_offset, out)};
}

std::string Network::parameter_name(std::size_t index) const {
  auto describe = [&](const std::string& layer, const Block& b) {
    if (index < b.bias_offset) return layer + ".weight[" + std::to_string(index - b.weight_offset) + "]";
    return layer + ".bias[" + std::to_string(index - b.bias_offset) + "]";
  };
  for (std::size_t l = 0; l < conv_offsets_.size(); ++l) {
    const auto& b = conv_offsets_[l];
    if (index >= b.weight_offset && index < b.bias_offset + spec_.conv_filters[l]) {
      return describe("conv" + std::to_string(l), b);
    }
  }
  for (std::size_t l = 0; l < dense_offsets_.size(); ++l) {
    const auto& b = dense_offsets_[l];
    if (index >= b.weight_offset && index < b.bias_offset + dense_layer(l).out_dim) {
      return describe(l < spec_.dense_dims.size() ? "dense" + std::to_string(l) : std::string("heads"), b);
    }
  }
  return "param[" + std::to_string(index) + "]";
}

void Network::check_input(const Tensor& input) const {
  if (input.channels() != spec_.input_channels || input.length() != spec_.input_length) {
    throw std::invalid_argument("network expects input " + std::to_string(spec_.input_channels) + "x" +
                                std::to_string(spec_.input_length) + ", got " + std::to_string(input.channels()) +
                                "x" + std::to_string(input.length()));
  }
  if (!input.all_finite()) throw std::invalid_argument("network input contains non-finite values");
}

namespace {

void relu_inplace(std::span<double> v) {
  for (auto& x : v) x = x > 0.0 ? x : 0.0;
}

}  // namespace

std::vector<double> Network::forward(const Tensor& input) const {
  ForwardTrace trace;
  return forward(input, trace);
}

std::vector<double> Network::forward(const Tensor& input, ForwardTrace& trace) const {
  check_input(input);
  trace.conv_inputs.clear();
  trace.conv_outputs.clear();
  trace.dense_inputs.clear();
  trace.dense_outputs.clear();

  Tensor x = input;
  for (std::size_t l = 0; l < conv_offsets_.size(); ++l) {
    Tensor y = conv1d_forward(x, conv_layer(l), spec_.padding);
    if (spec_.relu) relu_inplace(y.values());
    trace.conv_inputs.push_back(std::move(x));
    trace.conv_outputs.push_back(y);
    x = std::move(y);
  }
  auto pooled = global_max_pool(x);
  trace.pool_argmax = std::move(pooled.argmax);

  std::vector<double> h = std::move(pooled.values);
  for (std::size_t l = 0; l < dense_offsets_.size(); ++l) {
    std::vector<double> out = dense_forward(h, dense_layer(l));
    const bool head = l + 1 == dense_offsets_.size();
    if (spec_.relu && !head) relu_inplace(out);
    trace.dense_inputs.push_back(std::move(h));
    trace.dense_outputs.push_back(out);
    h = std::move(out);
  }
  return h;
}

void Network::backward(const ForwardTrace& trace, std::span<const double> grad_output,
                       std::span<double> grads) const {
  if (grads.size() != params_.size()) throw std::invalid_argument("backward: gradient buffer has the wrong size");
  if (grad_output.size() != spec_.output_size()) throw std::invalid_argument("backward: output gradient size");
  if (trace.dense_inputs.size() != dense_offsets_.size() || trace.conv_inputs.size() != conv_offsets_.size()) {
    throw std::logic_error("backward called without a matching forward trace");
  }

  std::vector<double> g(grad_output.begin(), grad_output.end());
  for (std::size_t l = dense_offsets_.size(); l-- > 0;) {
    const auto layer = dense_layer(l);
    const bool head = l + 1 == dense_offsets_.size();
    if (spec_.relu && !head) {
      const auto& out = trace.dense_outputs[l];
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (out[i] <= 0.0) g[i] = 0.0;
      }
    }
    std::vector<double> gin(layer.in_dim);
    const auto& b = dense_offsets_[l];
    dense_backward(trace.dense_inputs[l], layer, g, grads.subspan(b.weight_offset, layer.in_dim * layer.out_dim),
                   grads.subspan(b.bias_offset, layer.out_dim), gin);
    g = std::move(gin);
  }

  // Max pooling routes each channel's gradient to its argmax position.
  const Tensor& last = trace.conv_outputs.back();
  Tensor gt(last.channels(), last.length());
  for (std::size_t c = 0; c < last.channels(); ++c) gt.at(c, trace.pool_argmax[c]) = g[c];

  for (std::size_t l = conv_offsets_.size(); l-- > 0;) {
    if (spec_.relu) {
      const auto out = trace.conv_outputs[l].values();
      auto gv = gt.values();
      for (std::size_t i = 0; i < gv.size(); ++i) {
        if (out[i] <= 0.0) gv[i] = 0.0;
      }
    }
    const auto layer = conv_layer(l);
    const auto& b = conv_offsets_[l];
    Tensor gin;
    conv1d_backward(trace.conv_inputs[l], layer, gt, grads.subspan(b.weight_offset, layer.weight_count()),
                    grads.subspan(b.bias_offset, layer.out_channels), l > 0 ? &gin : nullptr, spec_.padding);
    if (l > 0) gt = std::move(gin);
  }
}

Tensor Network::encode(const Tensor& input) const {
  check_input(input);
  Tensor x = input;
  for (std::size_t l = 0; l < conv_offsets_.size(); ++l) {
    x = conv1d_forward(x, conv_layer(l), spec_.padding);
    if (spec_.relu) relu_inplace(x.values());
  }
  return x;
}

nlohmann::json Network::to_json() const {
  return {{"spec", spec_}, {"parameters", params_}};
}

Network Network::from_json(const nlohmann::json& j) {
  Network net;
  net.spec_ = j.at("spec").get<NetworkSpec>();
  net.spec_.validate();
  net.layout();
  auto params = j.at("parameters").get<std::vector<double>>();
  if (params.size() != net.params_.size()) {
    throw std::invalid_argument("network JSON: expected " + std::to_string(net.params_.size()) +
                                " parameters, found " + std::to_string(params.size()));
  }
  net.params_ = std::move(params);
  return net;
}

double mse_loss(std::span<const double> output, std::span<const double> target) {
  if (output.size() != target.size() || output.empty()) throw std::invalid_argument("mse_loss: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < output.size(); ++i) {
    const double d = output[i] - target[i];
    s += d * d;
  }
  return s / static_cast<double>(output.size());
}

}  // namespace trajcast::cnn
