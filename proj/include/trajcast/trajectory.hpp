#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace trajcast {

/// A plain (x, y) pair in pixel coordinates.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Center of a tracked vehicle in one frame (frames are counted at 20 fps).
struct TrajectoryPoint {
  std::uint64_t frame_index = 0;
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const TrajectoryPoint&, const TrajectoryPoint&) = default;
};

/// Window geometry: the first `alpha` points are observed, the remaining
/// `total_len - alpha` points are the forecast horizon.
struct SequenceConfig {
  std::size_t alpha = 25;
  std::size_t total_len = 50;
  std::size_t max_vehicles = 3;

  std::size_t horizon() const { return total_len - alpha; }

  /// Throws std::invalid_argument unless 0 < alpha < total_len and max_vehicles > 0.
  void validate() const;

  friend bool operator==(const SequenceConfig&, const SequenceConfig&) = default;
};

enum class MotionFamily { unknown, constant_velocity, lane_change, circular_arc, stationary };

std::string_view to_string(MotionFamily family);
MotionFamily motion_family_from_string(std::string_view name);

struct TrajectorySequence {
  std::uint64_t vehicle_id = 0;
  std::uint64_t window_index = 0;
  std::vector<TrajectoryPoint> points;
  // Generator metadata; not persisted in CSV.
  MotionFamily family = MotionFamily::unknown;

  std::vector<Point2> positions() const;
  std::vector<Point2> past(std::size_t alpha) const;
  std::vector<Point2> future(std::size_t alpha) const;

  friend bool operator==(const TrajectorySequence&, const TrajectorySequence&) = default;
};

/// Immutable collection of equal-length sequences.
class TrajectoryDataset {
 public:
  TrajectoryDataset() = default;

  /// Validates the config and every sequence (length, consecutive frames,
  /// finite coordinates). Throws std::invalid_argument on the first violation.
  TrajectoryDataset(SequenceConfig config, std::vector<TrajectorySequence> sequences);

  const SequenceConfig& config() const { return config_; }
  const std::vector<TrajectorySequence>& sequences() const { return sequences_; }
  std::size_t size() const { return sequences_.size(); }
  bool empty() const { return sequences_.empty(); }
  const TrajectorySequence& operator[](std::size_t i) const { return sequences_[i]; }

  friend bool operator==(const TrajectoryDataset&, const TrajectoryDataset&) = default;

 private:
  SequenceConfig config_;
  std::vector<TrajectorySequence> sequences_;
};

/// One raw tracker output row.
struct Observation {
  std::uint64_t vehicle_id = 0;
  std::int64_t frame_index = 0;
  double x = 0.0;
  double y = 0.0;
};

/// Cuts a raw observation stream into non-overlapping windows of
/// `config.total_len` frames. A vehicle contributes a sequence for window k
/// only if it is observed in every frame of [k*L, (k+1)*L). When more than
/// `max_vehicles` qualify, the lowest vehicle ids are kept.
TrajectoryDataset segment_stream(std::span<const Observation> observations,
                                 const SequenceConfig& config);

/// Seeded random partition; the train part has floor(train_fraction * n)
/// sequences. Both parts keep the input order.
std::pair<TrajectoryDataset, TrajectoryDataset> split_train_test(const TrajectoryDataset& dataset,
                                                                 double train_fraction,
                                                                 std::uint64_t seed);

/// Per-coordinate affine standardization fitted on a training set.
struct Standardizer {
  Point2 mean{0.0, 0.0};
  Point2 scale{1.0, 1.0};

  static Standardizer fit(const TrajectoryDataset& train);
  static Standardizer fit(std::span<const Point2> points);

  Point2 apply(Point2 p) const { return {(p.x - mean.x) / scale.x, (p.y - mean.y) / scale.y}; }
  Point2 invert(Point2 p) const { return {p.x * scale.x + mean.x, p.y * scale.y + mean.y}; }
};

}  // namespace trajcast
