#pragma once

#include <span>
#include <vector>

#include "trajcast/trajectory.hpp"

namespace trajcast {

using Forecasts = std::vector<std::vector<Point2>>;

/// Mean over sequences, steps and both coordinates of the squared error.
/// Throws std::invalid_argument on any shape mismatch or empty input.
double mse(const Forecasts& predictions, const Forecasts& truth);

/// MSE restricted to each contiguous block of `segment_length` horizon steps.
/// The horizon must be a multiple of `segment_length`.
std::vector<double> per_horizon_mse(const Forecasts& predictions, const Forecasts& truth,
                                    std::size_t segment_length);

}  // namespace trajcast
