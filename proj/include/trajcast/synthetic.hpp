#pragma once

#include <cstdint>

#include "json.hpp"

#include "trajcast/trajectory.hpp"

namespace trajcast {

/// Closed interval a parameter is drawn from uniformly. lo == hi pins it.
struct Range {
  double lo = 0.0;
  double hi = 0.0;

  friend bool operator==(const Range&, const Range&) = default;
};

// p(t) = p0 + v t
struct ConstantVelocityFamily {
  long long count = 0;
  Range x0{400, 1520}, y0{300, 900};
  Range vx{-8, 8}, vy{-3, 3};
};

// x(t) = x0 + vx t, y(t) = y0 + s * shift / (1 + exp(-(t - center) / width)), s = +-1
struct LaneChangeFamily {
  long long count = 0;
  Range x0{400, 1520}, y0{300, 900};
  Range vx{-8, 8};
  Range shift{40, 120};
  Range center{15, 35};
  Range width{2, 5};
};

// p(t) = c + r (cos(phase + s w t), sin(phase + s w t)), s = +-1
struct CircularArcFamily {
  long long count = 0;
  Range cx{700, 1220}, cy{450, 750};
  Range radius{150, 400};
  Range angular_speed{0.005, 0.03};
  Range phase{0.0, 6.283185307179586};
};

struct StationaryFamily {
  long long count = 0;
  Range x0{100, 1820}, y0{100, 1100};
};

/// Recipe for a synthetic dataset. Each sequence follows its family's closed
/// form plus i.i.d. Gaussian noise of standard deviation `noise_sigma`.
struct SyntheticSpec {
  SequenceConfig sequence;
  double noise_sigma = 2.0;
  double frame_width = 1920.0;
  double frame_height = 1200.0;
  ConstantVelocityFamily constant_velocity;
  LaneChangeFamily lane_change;
  CircularArcFamily circular_arc;
  StationaryFamily stationary;

  /// 200 constant-velocity, 100 lane-change, 50 arc, 50 stationary, sigma 2.
  static SyntheticSpec standard_suite();
};

/// Deterministic given the seed. Sequences are emitted family by family in the
/// order above; vehicle_id is the running index and window_index is 0.
TrajectoryDataset generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

void to_json(nlohmann::json& j, const Range& r);
void from_json(const nlohmann::json& j, Range& r);
void to_json(nlohmann::json& j, const SyntheticSpec& spec);
/// Missing keys keep their defaults; family entries may be a bare count.
void from_json(const nlohmann::json& j, SyntheticSpec& spec);
void to_json(nlohmann::json& j, const SequenceConfig& config);
void from_json(const nlohmann::json& j, SequenceConfig& config);

}  // namespace trajcast
