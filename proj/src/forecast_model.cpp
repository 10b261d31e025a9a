#include "trajcast/forecast_model.hpp"

#include <stdexcept>

namespace trajcast {

std::vector<WindowSample> joint_samples(const TrajectoryDataset& dataset) {
  return segment_samples(dataset, 0, dataset.config().horizon());
}

std::vector<WindowSample> segment_samples(const TrajectoryDataset& dataset, std::size_t start,
                                          std::size_t length) {
  const auto& cfg = dataset.config();
  if (length == 0 || start + length > cfg.horizon()) {
    throw std::invalid_argument("segment [" + std::to_string(start) + ", " + std::to_string(start + length) +
                                ") is outside the horizon of " + std::to_string(cfg.horizon()) + " steps");
  }
  std::vector<WindowSample> samples;
  samples.reserve(dataset.size());
  for (const auto& seq : dataset.sequences()) {
    auto future = seq.future(cfg.alpha);
    WindowSample s;
    s.past = seq.past(cfg.alpha);
    s.target.assign(future.begin() + static_cast<std::ptrdiff_t>(start),
                    future.begin() + static_cast<std::ptrdiff_t>(start + length));
    samples.push_back(std::move(s));
  }
  return samples;
}

std::vector<WindowSample> one_step_samples(const TrajectoryDataset& dataset) {
  const auto& cfg = dataset.config();
  std::vector<WindowSample> samples;
  samples.reserve(dataset.size() * cfg.horizon());
  for (const auto& seq : dataset.sequences()) {
    const auto all = seq.positions();
    for (std::size_t offset = 0; offset + cfg.alpha < all.size(); ++offset) {
      WindowSample s;
      s.past.assign(all.begin() + static_cast<std::ptrdiff_t>(offset),
                    all.begin() + static_cast<std::ptrdiff_t>(offset + cfg.alpha));
      s.target = {all[offset + cfg.alpha]};
      samples.push_back(std::move(s));
    }
  }
  return samples;
}

std::vector<double> flatten(std::span<const Point2> points) {
  std::vector<double> out;
  out.reserve(points.size() * 2);
  for (const auto& p : points) {
    out.push_back(p.x);
    out.push_back(p.y);
  }
  return out;
}

std::vector<Point2> unflatten(std::span<const double> values) {
  if (values.size() % 2 != 0) throw std::invalid_argument("unflatten: odd number of values");
  std::vector<Point2> out;
  out.reserve(values.size() / 2);
  for (std::size_t i = 0; i < values.size(); i += 2) out.push_back({values[i], values[i + 1]});
  return out;
}

std::pair<std::size_t, std::size_t> sample_shape(std::span<const WindowSample> samples) {
  if (samples.empty()) throw std::invalid_argument("cannot fit on an empty training set");
  const std::size_t in = samples.front().past.size();
  const std::size_t out = samples.front().target.size();
  if (in == 0 || out == 0) throw std::invalid_argument("training samples need non-empty past and target");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].past.size() != in || samples[i].target.size() != out) {
      throw std::invalid_argument("training sample " + std::to_string(i) + " has an inconsistent shape");
    }
  }
  return {in, out};
}

}  // namespace trajcast
