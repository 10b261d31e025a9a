#include "trajcast/strategies.hpp"

#include <stdexcept>

#include "trajcast/model_io.hpp"

namespace trajcast {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::iterative: return "iterative";
    case Strategy::joint: return "joint";
    case Strategy::independent: return "independent";
  }
  return "joint";
}

Strategy strategy_from_string(std::string_view name) {
  for (auto s : {Strategy::iterative, Strategy::joint, Strategy::independent}) {
    if (to_string(s) == name) return s;
  }
  throw std::invalid_argument("unknown strategy '" + std::string(name) + "'");
}

void HorizonPlan::validate() const {
  if (alpha == 0 || horizon == 0) throw std::invalid_argument("horizon plan needs alpha > 0 and horizon > 0");
  if (strategy == Strategy::independent) {
    if (segment_length == 0 || horizon % segment_length != 0) {
      throw std::invalid_argument("segment_length " + std::to_string(segment_length) +
                                  " does not divide the horizon of " + std::to_string(horizon));
    }
  }
}

std::size_t HorizonPlan::model_count() const {
  return strategy == Strategy::independent ? horizon / segment_length : 1;
}

std::vector<Point2> iterative_forecast(const ForecastModel& one_step, std::span<const Point2> past,
                                       std::size_t horizon) {
  std::vector<Point2> window(past.begin(), past.end());
  std::vector<Point2> out;
  out.reserve(horizon);
  for (std::size_t h = 0; h < horizon; ++h) {
    const auto next = one_step.predict(window);
    if (next.size() != 1) {
      throw std::invalid_argument("iterative strategy needs a one-step model, got " + std::to_string(next.size()) +
                                  " steps");
    }
    out.push_back(next.front());
    window.erase(window.begin());
    window.push_back(next.front());
  }
  return out;
}

std::vector<Point2> joint_forecast(const ForecastModel& model, std::span<const Point2> past, std::size_t horizon) {
  auto out = model.predict(past);
  if (out.size() != horizon) {
    throw std::invalid_argument("joint model emitted " + std::to_string(out.size()) + " steps, expected " +
                                std::to_string(horizon));
  }
  return out;
}

std::vector<Point2> independent_forecast(std::span<const std::unique_ptr<ForecastModel>> models,
                                         std::span<const Point2> past, std::size_t segment_length,
                                         std::size_t horizon) {
  if (segment_length == 0 || models.size() * segment_length != horizon) {
    throw std::invalid_argument("independent strategy needs " + std::to_string(horizon) + " steps, got " +
                                std::to_string(models.size()) + " models of " + std::to_string(segment_length));
  }
  std::vector<Point2> out;
  out.reserve(horizon);
  for (std::size_t j = 0; j < models.size(); ++j) {
    const auto seg = models[j]->predict(past);
    if (seg.size() != segment_length) {
      throw std::invalid_argument("segment model " + std::to_string(j) + " emitted " + std::to_string(seg.size()) +
                                  " steps, expected " + std::to_string(segment_length));
    }
    out.insert(out.end(), seg.begin(), seg.end());
  }
  return out;
}

namespace {

std::vector<WindowSample> sliding_one_step(std::span<const WindowSample> samples, std::size_t alpha) {
  std::vector<WindowSample> out;
  for (const auto& s : samples) {
    std::vector<Point2> all(s.past.begin(), s.past.end());
    all.insert(all.end(), s.target.begin(), s.target.end());
    for (std::size_t offset = 0; offset + alpha < all.size(); ++offset) {
      WindowSample w;
      w.past.assign(all.begin() + static_cast<std::ptrdiff_t>(offset),
                    all.begin() + static_cast<std::ptrdiff_t>(offset + alpha));
      w.target = {all[offset + alpha]};
      out.push_back(std::move(w));
    }
  }
  return out;
}

std::vector<WindowSample> segment_of(std::span<const WindowSample> samples, std::size_t start, std::size_t len) {
  std::vector<WindowSample> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    out.push_back({s.past, {s.target.begin() + static_cast<std::ptrdiff_t>(start),
                            s.target.begin() + static_cast<std::ptrdiff_t>(start + len)}});
  }
  return out;
}

std::vector<WindowSample> standardized(std::span<const WindowSample> samples, const Standardizer& st) {
  std::vector<WindowSample> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    WindowSample w;
    for (const auto& p : s.past) w.past.push_back(st.apply(p));
    for (const auto& p : s.target) w.target.push_back(st.apply(p));
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace

MultiStepForecaster::MultiStepForecaster(HorizonPlan plan, std::unique_ptr<ForecastModel> prototype,
                                         bool standardize)
    : plan_(plan), prototype_(std::move(prototype)), standardize_(standardize) {
  plan_.validate();
  if (!prototype_) throw std::invalid_argument("multistep forecaster needs a base model");
}

void MultiStepForecaster::fit_samples(std::span<const WindowSample> samples) {
  const auto [in, out] = sample_shape(samples);
  if (in != plan_.alpha || out != plan_.horizon) {
    throw std::invalid_argument("training samples are " + std::to_string(in) + " -> " + std::to_string(out) +
                                " steps, plan expects " + std::to_string(plan_.alpha) + " -> " +
                                std::to_string(plan_.horizon));
  }

  std::vector<WindowSample> train(samples.begin(), samples.end());
  std::vector<WindowSample> val = validation_;
  standardizer_.reset();
  if (standardize_) {
    std::vector<Point2> pts;
    for (const auto& s : samples) {
      pts.insert(pts.end(), s.past.begin(), s.past.end());
      pts.insert(pts.end(), s.target.begin(), s.target.end());
    }
    standardizer_ = Standardizer::fit(pts);
    train = standardized(train, *standardizer_);
    val = standardized(val, *standardizer_);
  }

  models_.clear();
  const std::size_t count = plan_.model_count();
  for (std::size_t j = 0; j < count; ++j) {
    auto model = prototype_->clone_unfitted();
    std::vector<WindowSample> part, part_val;
    switch (plan_.strategy) {
      case Strategy::iterative:
        part = sliding_one_step(train, plan_.alpha);
        part_val = sliding_one_step(val, plan_.alpha);
        break;
      case Strategy::joint:
        part = train;
        part_val = val;
        break;
      case Strategy::independent:
        part = segment_of(train, j * plan_.segment_length, plan_.segment_length);
        part_val = segment_of(val, j * plan_.segment_length, plan_.segment_length);
        break;
    }
    model->set_validation(std::move(part_val));
    model->fit_samples(part);
    models_.push_back(std::move(model));
  }
}

std::vector<Point2> MultiStepForecaster::predict(std::span<const Point2> past) const {
  if (models_.empty()) throw std::logic_error("predict called before fit");
  if (past.size() != plan_.alpha) {
    throw std::invalid_argument("expected " + std::to_string(plan_.alpha) + " past points, got " +
                                std::to_string(past.size()));
  }
  std::vector<Point2> input(past.begin(), past.end());
  if (standardizer_) {
    for (auto& p : input) p = standardizer_->apply(p);
  }
  std::vector<Point2> out;
  switch (plan_.strategy) {
    case Strategy::iterative: out = iterative_forecast(*models_.front(), input, plan_.horizon); break;
    case Strategy::joint: out = joint_forecast(*models_.front(), input, plan_.horizon); break;
    case Strategy::independent:
      out = independent_forecast(models_, input, plan_.segment_length, plan_.horizon);
      break;
  }
  if (standardizer_) {
    for (auto& p : out) p = standardizer_->invert(p);
  }
  return out;
}

std::vector<LossRecord> MultiStepForecaster::loss_log() const {
  return models_.empty() ? std::vector<LossRecord>{} : models_.front()->loss_log();
}

std::vector<std::vector<LossRecord>> MultiStepForecaster::sub_model_logs() const {
  std::vector<std::vector<LossRecord>> logs;
  for (const auto& m : models_) logs.push_back(m->loss_log());
  return logs;
}

nlohmann::json MultiStepForecaster::to_json() const {
  nlohmann::json j{{"kind", kind()},
                   {"strategy", to_string(plan_.strategy)},
                   {"alpha", plan_.alpha},
                   {"horizon", plan_.horizon},
                   {"segment_length", plan_.segment_length},
                   {"standardize", standardize_},
                   {"prototype", prototype_->to_json()}};
  if (standardizer_) {
    j["standardizer"] = {{"mean", {standardizer_->mean.x, standardizer_->mean.y}},
                         {"scale", {standardizer_->scale.x, standardizer_->scale.y}}};
  }
  auto models = nlohmann::json::array();
  for (const auto& m : models_) models.push_back(m->to_json());
  j["models"] = std::move(models);
  return j;
}

std::unique_ptr<MultiStepForecaster> MultiStepForecaster::from_json(const nlohmann::json& j) {
  HorizonPlan plan;
  plan.strategy = strategy_from_string(j.at("strategy").get<std::string>());
  plan.alpha = j.at("alpha").get<std::size_t>();
  plan.horizon = j.at("horizon").get<std::size_t>();
  plan.segment_length = j.value("segment_length", plan.segment_length);
  auto m = std::make_unique<MultiStepForecaster>(plan, model_from_json(j.at("prototype")),
                                                 j.value("standardize", false));
  if (j.contains("standardizer")) {
    const auto& s = j.at("standardizer");
    Standardizer st;
    st.mean = {s.at("mean").at(0).get<double>(), s.at("mean").at(1).get<double>()};
    st.scale = {s.at("scale").at(0).get<double>(), s.at("scale").at(1).get<double>()};
    m->standardizer_ = st;
  }
  for (const auto& sub : j.value("models", nlohmann::json::array())) m->models_.push_back(model_from_json(sub));
  if (!m->models_.empty() && m->models_.size() != plan.model_count()) {
    throw std::invalid_argument("multistep model lists " + std::to_string(m->models_.size()) +
                                " sub-models, plan needs " + std::to_string(plan.model_count()));
  }
  return m;
}

std::unique_ptr<ForecastModel> MultiStepForecaster::clone_unfitted() const {
  return std::make_unique<MultiStepForecaster>(plan_, prototype_->clone_unfitted(), standardize_);
}

}  // namespace trajcast
