#include "trajcast/cnn/cnn_forecaster.hpp"

#include <stdexcept>

namespace trajcast::cnn {

void to_json(nlohmann::json& j, const CnnOptions& o) {
  j = {{"architecture",
        {{"conv_filters", o.architecture.conv_filters},
         {"kernel_size", o.architecture.kernel_size},
         {"dense_dims", o.architecture.dense_dims},
         {"padding", o.architecture.padding == Padding::centered ? "centered" : "right"},
         {"relu", o.architecture.relu}}},
       {"epochs", o.training.epochs},
       {"batch_size", o.training.batch_size},
       {"learning_rate", o.training.adam.learning_rate},
       {"beta1", o.training.adam.beta1},
       {"beta2", o.training.adam.beta2},
       {"adam_epsilon", o.training.adam.epsilon},
       {"validation_every", o.training.validation_every},
       {"train_seed", o.training.seed},
       {"init_seed", o.init_seed}};
}

void from_json(const nlohmann::json& j, CnnOptions& o) {
  if (j.contains("architecture")) {
    const auto& a = j.at("architecture");
    if (a.is_string()) {
      const auto name = a.get<std::string>();
      if (name == "full_scale") {
        o.architecture = NetworkSpec::full_scale(o.architecture.input_length, o.architecture.heads);
      } else if (name == "desk_scale") {
        o.architecture = NetworkSpec::desk_scale(o.architecture.input_length, o.architecture.heads);
      } else {
        throw std::invalid_argument("unknown architecture preset '" + name + "'");
      }
    } else {
      from_json(a, o.architecture);
    }
  }
  o.training.epochs = j.value("epochs", o.training.epochs);
  o.training.batch_size = j.value("batch_size", o.training.batch_size);
  o.training.adam.learning_rate = j.value("learning_rate", o.training.adam.learning_rate);
  o.training.adam.beta1 = j.value("beta1", o.training.adam.beta1);
  o.training.adam.beta2 = j.value("beta2", o.training.adam.beta2);
  o.training.adam.epsilon = j.value("adam_epsilon", o.training.adam.epsilon);
  o.training.validation_every = j.value("validation_every", o.training.validation_every);
  o.training.seed = j.value("train_seed", o.training.seed);
  o.init_seed = j.value("init_seed", o.init_seed);
}

std::vector<TrainingExample> to_examples(std::span<const WindowSample> samples) {
  std::vector<TrainingExample> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back({Tensor::from_points(s.past), flatten(s.target)});
  return out;
}

CnnForecaster::CnnForecaster(CnnOptions options) : options_(std::move(options)) {}

void CnnForecaster::fit_samples(std::span<const WindowSample> samples) {
  const auto [in, out] = sample_shape(samples);
  NetworkSpec spec = options_.architecture;
  spec.input_channels = 2;
  spec.input_length = in;
  spec.heads = out;
  Network net(spec, options_.init_seed);

  const auto examples = to_examples(samples);
  std::vector<TrainingExample> validation;
  for (const auto& v : validation_) {
    if (v.past.size() != in || v.target.size() != out) {
      throw std::invalid_argument("validation sample shape differs from the training samples");
    }
  }
  if (!validation_.empty()) validation = to_examples(validation_);

  loss_log_.clear();
  train(net, examples, options_.training, [this](const LossRecord& r) { loss_log_.push_back(r); }, validation);
  network_ = std::move(net);
}

std::size_t CnnForecaster::input_steps() const { return network_ ? network_->spec().input_length : 0; }

std::size_t CnnForecaster::output_steps() const { return network_ ? network_->spec().heads : 0; }

std::vector<Point2> CnnForecaster::predict(std::span<const Point2> past) const {
  if (!network_) throw std::logic_error("predict called before fit");
  if (past.size() != input_steps()) {
    throw std::invalid_argument("cnn expects " + std::to_string(input_steps()) + " past points, got " +
                                std::to_string(past.size()));
  }
  const auto out = network_->forward(Tensor::from_points(past));
  return unflatten(out);
}

nlohmann::json CnnForecaster::to_json() const {
  nlohmann::json j{{"kind", kind()}, {"options", options_}};
  if (network_) j["network"] = network_->to_json();
  return j;
}

std::unique_ptr<CnnForecaster> CnnForecaster::from_json(const nlohmann::json& j) {
  auto m = std::make_unique<CnnForecaster>(j.value("options", nlohmann::json::object()).get<CnnOptions>());
  if (j.contains("network")) m->network_ = Network::from_json(j.at("network"));
  return m;
}

std::unique_ptr<ForecastModel> CnnForecaster::clone_unfitted() const {
  return std::make_unique<CnnForecaster>(options_);
}

}  // namespace trajcast::cnn
