#include "trajcast/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>

namespace trajcast {

void SequenceConfig::validate() const {
  if (alpha == 0 || alpha >= total_len) {
    throw std::invalid_argument("sequence config requires 0 < alpha < total_len (alpha=" +
                                std::to_string(alpha) + ", total_len=" + std::to_string(total_len) +
                                ")");
  }
  if (max_vehicles == 0) throw std::invalid_argument("sequence config requires max_vehicles > 0");
}

std::string_view to_string(MotionFamily family) {
  switch (family) {
    case MotionFamily::constant_velocity: return "constant_velocity";
    case MotionFamily::lane_change: return "lane_change";
    case MotionFamily::circular_arc: return "circular_arc";
    case MotionFamily::stationary: return "stationary";
    case MotionFamily::unknown: break;
  }
  return "unknown";
}

MotionFamily motion_family_from_string(std::string_view name) {
  for (auto f : {MotionFamily::constant_velocity, MotionFamily::lane_change,
                 MotionFamily::circular_arc, MotionFamily::stationary}) {
    if (to_string(f) == name) return f;
  }
  return MotionFamily::unknown;
}

std::vector<Point2> TrajectorySequence::positions() const {
  std::vector<Point2> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back({p.x, p.y});
  return out;
}

std::vector<Point2> TrajectorySequence::past(std::size_t alpha) const {
  auto all = positions();
  all.resize(std::min(alpha, all.size()));
  return all;
}

std::vector<Point2> TrajectorySequence::future(std::size_t alpha) const {
  auto all = positions();
  if (alpha >= all.size()) return {};
  return {all.begin() + static_cast<std::ptrdiff_t>(alpha), all.end()};
}

TrajectoryDataset::TrajectoryDataset(SequenceConfig config, std::vector<TrajectorySequence> sequences)
    : config_(config), sequences_(std::move(sequences)) {
  config_.validate();
  for (std::size_t s = 0; s < sequences_.size(); ++s) {
    const auto& seq = sequences_[s];
    if (seq.points.size() != config_.total_len) {
      throw std::invalid_argument("sequence " + std::to_string(s) + " has " +
                                  std::to_string(seq.points.size()) + " points, expected " +
                                  std::to_string(config_.total_len));
    }
    for (std::size_t t = 0; t < seq.points.size(); ++t) {
      const auto& p = seq.points[t];
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
        throw std::invalid_argument("sequence " + std::to_string(s) + " has a non-finite coordinate at t=" +
                                    std::to_string(t));
      }
      if (t > 0 && p.frame_index != seq.points[t - 1].frame_index + 1) {
        throw std::invalid_argument("sequence " + std::to_string(s) + " has non-consecutive frames at t=" +
                                    std::to_string(t));
      }
    }
  }
}

TrajectoryDataset segment_stream(std::span<const Observation> observations, const SequenceConfig& config) {
  config.validate();
  const auto window_len = static_cast<std::uint64_t>(config.total_len);

  // vehicle -> frame -> position
  std::map<std::uint64_t, std::map<std::uint64_t, Point2>> tracks;
  for (const auto& obs : observations) {
    if (!std::isfinite(obs.x) || !std::isfinite(obs.y)) {
      throw std::invalid_argument("non-finite coordinate for vehicle " + std::to_string(obs.vehicle_id) +
                                  " at frame " + std::to_string(obs.frame_index));
    }
    if (obs.frame_index < 0) {
      throw std::invalid_argument("negative frame index for vehicle " + std::to_string(obs.vehicle_id));
    }
    auto [it, inserted] =
        tracks[obs.vehicle_id].emplace(static_cast<std::uint64_t>(obs.frame_index), Point2{obs.x, obs.y});
    if (!inserted) {
      throw std::invalid_argument("duplicate observation for vehicle " + std::to_string(obs.vehicle_id) +
                                  " at frame " + std::to_string(obs.frame_index));
    }
  }

  // window -> vehicles observed in every frame of that window (ascending ids)
  std::map<std::uint64_t, std::vector<std::uint64_t>> complete;
  for (const auto& [vid, frames] : tracks) {
    std::map<std::uint64_t, std::uint64_t> counts;
    for (const auto& entry : frames) ++counts[entry.first / window_len];
    for (const auto& [window, count] : counts) {
      if (count == window_len) complete[window].push_back(vid);
    }
  }

  std::vector<TrajectorySequence> sequences;
  for (const auto& [window, vids] : complete) {
    const std::size_t keep = std::min(vids.size(), config.max_vehicles);
    for (std::size_t i = 0; i < keep; ++i) {
      TrajectorySequence seq;
      seq.vehicle_id = vids[i];
      seq.window_index = window;
      seq.points.reserve(config.total_len);
      const auto& frames = tracks.at(vids[i]);
      for (std::uint64_t f = window * window_len; f < (window + 1) * window_len; ++f) {
        const auto& p = frames.at(f);
        seq.points.push_back({f, p.x, p.y});
      }
      sequences.push_back(std::move(seq));
    }
  }
  return TrajectoryDataset(config, std::move(sequences));
}

std::pair<TrajectoryDataset, TrajectoryDataset> split_train_test(const TrajectoryDataset& dataset,
                                                                 double train_fraction, std::uint64_t seed) {
  if (dataset.empty()) throw std::invalid_argument("cannot split an empty dataset");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("train_fraction must lie in (0, 1)");
  }
  const std::size_t n = dataset.size();
  // The small offset keeps products such as 0.29 * 100 from flooring to 28.
  const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n) + 1e-9));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<bool> in_train(n, false);
  for (std::size_t i = 0; i < n_train; ++i) in_train[order[i]] = true;

  std::vector<TrajectorySequence> train, test;
  train.reserve(n_train);
  test.reserve(n - n_train);
  for (std::size_t i = 0; i < n; ++i) {
    (in_train[i] ? train : test).push_back(dataset[i]);
  }
  return {TrajectoryDataset(dataset.config(), std::move(train)),
          TrajectoryDataset(dataset.config(), std::move(test))};
}

Standardizer Standardizer::fit(const TrajectoryDataset& train) {
  std::vector<Point2> points;
  points.reserve(train.size() * train.config().total_len);
  for (const auto& seq : train.sequences()) {
    for (const auto& p : seq.points) points.push_back({p.x, p.y});
  }
  return fit(points);
}

Standardizer Standardizer::fit(std::span<const Point2> points) {
  if (points.empty()) throw std::invalid_argument("cannot fit a standardizer on no points");
  const auto n = static_cast<double>(points.size());
  Standardizer s;
  for (const auto& p : points) {
    s.mean.x += p.x;
    s.mean.y += p.y;
  }
  s.mean.x /= n;
  s.mean.y /= n;
  double vx = 0, vy = 0;
  for (const auto& p : points) {
    vx += (p.x - s.mean.x) * (p.x - s.mean.x);
    vy += (p.y - s.mean.y) * (p.y - s.mean.y);
  }
  const double sdx = std::sqrt(vx / n);
  const double sdy = std::sqrt(vy / n);
  s.scale = {sdx > 0 ? sdx : 1.0, sdy > 0 ? sdy : 1.0};
  return s;
}

}  // namespace trajcast
