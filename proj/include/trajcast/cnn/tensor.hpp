#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "trajcast/trajectory.hpp"

namespace trajcast::cnn {

/// Multi-channel 1-D signal stored channel-major (channels x length).
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t channels, std::size_t length, double fill = 0.0)
      : channels_(channels), length_(length), values_(channels * length, fill) {}

  /// Channel 0 holds the x series and channel 1 the y series.
  static Tensor from_points(std::span<const Point2> points);

  std::size_t channels() const { return channels_; }
  std::size_t length() const { return length_; }

  double& at(std::size_t c, std::size_t i) { return values_[c * length_ + i]; }
  double at(std::size_t c, std::size_t i) const { return values_[c * length_ + i]; }

  std::span<double> channel(std::size_t c) { return {values_.data() + c * length_, length_}; }
  std::span<const double> channel(std::size_t c) const { return {values_.data() + c * length_, length_}; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  bool all_finite() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::size_t channels_ = 0;
  std::size_t length_ = 0;
  std::vector<double> values_;
};

}  // namespace trajcast::cnn
