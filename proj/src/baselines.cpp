#include "trajcast/baselines.hpp"

#include <stdexcept>

namespace trajcast {
namespace {

void check_past(std::span<const Point2> past, std::size_t expected) {
  if (past.empty()) throw std::invalid_argument("predict: empty past window");
  if (expected != 0 && past.size() != expected) {
    throw std::invalid_argument("predict: expected " + std::to_string(expected) + " past points, got " +
                                std::to_string(past.size()));
  }
}

void check_fitted(std::size_t output_steps) {
  if (output_steps == 0) throw std::logic_error("predict called before fit");
}

}  // namespace

std::vector<Point2> mean_baseline_predict(std::span<const Point2> past, std::size_t steps) {
  if (past.empty()) throw std::invalid_argument("mean baseline: empty past window");
  // Summing offsets from the first point keeps a constant window exact.
  const Point2 ref = past.front();
  double sx = 0, sy = 0;
  for (const auto& p : past) {
    sx += p.x - ref.x;
    sy += p.y - ref.y;
  }
  const auto n = static_cast<double>(past.size());
  return std::vector<Point2>(steps, Point2{ref.x + sx / n, ref.y + sy / n});
}

std::vector<Point2> last_value_predict(std::span<const Point2> past, std::size_t steps) {
  if (past.empty()) throw std::invalid_argument("last value baseline: empty past window");
  return std::vector<Point2>(steps, past.back());
}

// ---------------------------------------------------------------------------

void MeanBaseline::fit_samples(std::span<const WindowSample> samples) {
  const auto [in, out] = sample_shape(samples);
  input_steps_ = in;
  output_steps_ = out;
  corpus_mean_.assign(out, Point2{});
  if (mode_ == Mode::corpus) {
    for (const auto& s : samples) {
      for (std::size_t t = 0; t < out; ++t) {
        corpus_mean_[t].x += s.target[t].x;
        corpus_mean_[t].y += s.target[t].y;
      }
    }
    const auto n = static_cast<double>(samples.size());
    for (auto& p : corpus_mean_) {
      p.x /= n;
      p.y /= n;
    }
  }
}

std::vector<Point2> MeanBaseline::predict(std::span<const Point2> past) const {
  check_fitted(output_steps_);
  check_past(past, input_steps_);
  if (mode_ == Mode::corpus) {
    if (corpus_mean_.size() != output_steps_) throw std::logic_error("corpus mean baseline is not fitted");
    return corpus_mean_;
  }
  return mean_baseline_predict(past, output_steps_);
}

nlohmann::json MeanBaseline::to_json() const {
  nlohmann::json j{{"kind", kind()},
                   {"mode", mode_ == Mode::corpus ? "corpus" : "per_window"},
                   {"input_steps", input_steps_},
                   {"output_steps", output_steps_}};
  if (mode_ == Mode::corpus) j["corpus_mean"] = flatten(corpus_mean_);
  return j;
}

std::unique_ptr<MeanBaseline> MeanBaseline::from_json(const nlohmann::json& j) {
  const auto mode = j.value("mode", std::string("per_window")) == "corpus" ? Mode::corpus : Mode::per_window;
  auto m = std::make_unique<MeanBaseline>(mode, j.value("output_steps", std::size_t{0}));
  m->input_steps_ = j.value("input_steps", std::size_t{0});
  if (mode == Mode::corpus && j.contains("corpus_mean")) {
    m->corpus_mean_ = unflatten(j.at("corpus_mean").get<std::vector<double>>());
  }
  return m;
}

std::unique_ptr<ForecastModel> MeanBaseline::clone_unfitted() const { return std::make_unique<MeanBaseline>(mode_); }

// ---------------------------------------------------------------------------

void LastValueBaseline::fit_samples(std::span<const WindowSample> samples) {
  const auto [in, out] = sample_shape(samples);
  input_steps_ = in;
  output_steps_ = out;
}

std::vector<Point2> LastValueBaseline::predict(std::span<const Point2> past) const {
  check_fitted(output_steps_);
  check_past(past, input_steps_);
  return last_value_predict(past, output_steps_);
}

nlohmann::json LastValueBaseline::to_json() const {
  return {{"kind", kind()}, {"input_steps", input_steps_}, {"output_steps", output_steps_}};
}

std::unique_ptr<LastValueBaseline> LastValueBaseline::from_json(const nlohmann::json& j) {
  auto m = std::make_unique<LastValueBaseline>(j.value("output_steps", std::size_t{0}));
  m->input_steps_ = j.value("input_steps", std::size_t{0});
  return m;
}

std::unique_ptr<ForecastModel> LastValueBaseline::clone_unfitted() const {
  return std::make_unique<LastValueBaseline>();
}

}  // namespace trajcast
