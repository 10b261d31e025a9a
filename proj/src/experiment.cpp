#include "trajcast/experiment.hpp"

#include <chrono>
#include <fstream>
#include <set>
#include <sstream>

#include "trajcast/csv_io.hpp"
#include "trajcast/linear_model.hpp"
#include "trajcast/model_io.hpp"
#include "trajcast/regression_tree.hpp"

namespace trajcast {

namespace fs = std::filesystem;
using nlohmann::json;

SyntheticSpec synthetic_spec_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() != "standard") {
      throw std::invalid_argument("unknown synthetic preset '" + j.get<std::string>() + "'");
    }
    return SyntheticSpec::standard_suite();
  }
  if (!j.is_object()) throw std::invalid_argument("synthetic spec must be an object or \"standard\"");
  SyntheticSpec spec;
  if (j.contains("preset")) spec = synthetic_spec_from_json(j.at("preset"));
  from_json(j, spec);
  return spec;
}

namespace {

const std::set<std::string>& known_kinds() {
  static const std::set<std::string> kinds{"mean", "last_value", "linear", "tree", "cnn"};
  return kinds;
}

MethodConfig method_from_json(const json& j) {
  MethodConfig m;
  if (j.is_string()) {
    m.kind = j.get<std::string>();
  } else {
    m.kind = j.at("kind").get<std::string>();
    if (j.contains("strategy")) m.strategy = strategy_from_string(j.at("strategy").get<std::string>());
    m.segment_length = j.value("segment_length", m.segment_length);
    m.ridge_epsilon = j.value("ridge_epsilon", m.ridge_epsilon);
    m.max_leaf_samples = j.value("max_leaf_samples", m.max_leaf_samples);
    const auto mode = j.value("mode", std::string("per_window"));
    if (mode == "corpus") {
      m.mean_mode = MeanBaseline::Mode::corpus;
    } else if (mode != "per_window") {
      throw std::invalid_argument("unknown mean mode '" + mode + "'");
    }
    if (j.contains("cnn")) m.cnn = j.at("cnn").get<cnn::CnnOptions>();
    m.name = j.value("name", std::string());
  }
  if (!known_kinds().contains(m.kind)) throw std::invalid_argument("unknown method kind '" + m.kind + "'");
  if (m.name.empty()) m.name = m.kind + "_" + std::string(to_string(m.strategy));
  return m;
}

json method_to_json(const MethodConfig& m) {
  json j{{"name", m.name}, {"kind", m.kind}, {"strategy", to_string(m.strategy)}};
  if (m.strategy == Strategy::independent) j["segment_length"] = m.segment_length;
  if (m.kind == "linear") j["ridge_epsilon"] = m.ridge_epsilon;
  if (m.kind == "tree") j["max_leaf_samples"] = m.max_leaf_samples;
  if (m.kind == "mean") j["mode"] = m.mean_mode == MeanBaseline::Mode::corpus ? "corpus" : "per_window";
  if (m.kind == "cnn") j["cnn"] = m.cnn;
  return j;
}

std::vector<MethodConfig> default_methods() {
  std::vector<MethodConfig> methods;
  for (const char* kind : {"mean", "last_value", "linear", "tree", "cnn"}) methods.push_back(method_from_json(kind));
  MethodConfig independent = method_from_json("cnn");
  independent.strategy = Strategy::independent;
  independent.name = "cnn_independent";
  methods.push_back(independent);
  return methods;
}

template <class F>
auto stage(const std::string& name, F&& body) {
  try {
    return body();
  } catch (const ExperimentError&) {
    throw;
  } catch (const std::exception& e) {
    throw ExperimentError(name, e.what());
  }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Files are written into a hidden sibling directory and only moved into the
// destination once everything succeeded.
class StagedDirectory {
 public:
  explicit StagedDirectory(fs::path target) : target_(std::move(target)) {
    if (target_.empty()) throw std::invalid_argument("output directory is empty");
    const auto parent = target_.has_parent_path() ? target_.parent_path() : fs::path(".");
    fs::create_directories(parent);
    staging_ = parent / ("." + target_.filename().string() + ".partial");
    fs::remove_all(staging_);
    fs::create_directories(staging_);
  }
  StagedDirectory(const StagedDirectory&) = delete;
  StagedDirectory& operator=(const StagedDirectory&) = delete;
  ~StagedDirectory() {
    std::error_code ec;
    fs::remove_all(staging_, ec);
  }

  const fs::path& path() const { return staging_; }

  void commit() {
    fs::create_directories(target_);
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(staging_)) {
      if (!entry.is_directory()) files.push_back(entry.path());
    }
    for (const auto& file : files) {
      const auto dest = target_ / fs::relative(file, staging_);
      fs::create_directories(dest.parent_path());
      fs::rename(file, dest);
    }
  }

 private:
  fs::path target_;
  fs::path staging_;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::vector<WindowSample> samples_of(const TrajectoryDataset& ds) { return joint_samples(ds); }

}  // namespace

ExperimentConfig experiment_config_from_json(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw std::invalid_argument("experiment config must be a JSON object");
  ExperimentConfig c;
  const json data = j.value("data", json::object());
  if (data.contains("csv")) {
    if (data.contains("synthetic")) throw std::invalid_argument("data needs either 'synthetic' or 'csv', not both");
    fs::path p = data.at("csv").get<std::string>();
    c.csv = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  } else {
    c.synthetic = synthetic_spec_from_json(data.value("synthetic", json("standard")));
    c.data_seed = data.value("seed", c.data_seed);
    c.sequence = c.synthetic->sequence;
  }
  if (j.contains("sequence")) {
    from_json(j.at("sequence"), c.sequence);
    if (c.synthetic) c.synthetic->sequence = c.sequence;
  }
  c.sequence.validate();

  const json split = j.value("split", json::object());
  c.train_fraction = split.value("train_fraction", c.train_fraction);
  c.split_seed = split.value("seed", c.split_seed);
  c.standardize = j.value("standardize", c.standardize);

  if (j.contains("methods")) {
    for (const auto& m : j.at("methods")) c.methods.push_back(method_from_json(m));
  } else {
    c.methods = default_methods();
  }
  if (c.methods.empty()) throw std::invalid_argument("experiment lists no methods");
  std::set<std::string> names;
  for (const auto& m : c.methods) {
    if (!names.insert(m.name).second) throw std::invalid_argument("duplicate method name '" + m.name + "'");
    HorizonPlan{m.strategy, c.sequence.alpha, c.sequence.horizon(), m.segment_length}.validate();
  }

  const json report = j.value("report", json::object());
  c.report_segment_length = report.value("segment_length", c.report_segment_length);
  c.validation_curves = report.value("validation_curves", c.validation_curves);
  if (c.report_segment_length == 0 || c.sequence.horizon() % c.report_segment_length != 0) {
    throw std::invalid_argument("report segment_length must divide the horizon");
  }
  if (j.contains("output_dir")) {
    fs::path p = j.at("output_dir").get<std::string>();
    c.output_dir = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  }
  return c;
}

ExperimentConfig load_experiment_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
  return experiment_config_from_json(j, path.parent_path());
}

json to_json(const ExperimentConfig& c) {
  json data;
  if (c.csv) {
    data["csv"] = c.csv->generic_string();
  } else {
    data["synthetic"] = *c.synthetic;
    data["seed"] = c.data_seed;
  }
  auto methods = json::array();
  for (const auto& m : c.methods) methods.push_back(method_to_json(m));
  return {{"data", data},
          {"sequence", c.sequence},
          {"split", {{"train_fraction", c.train_fraction}, {"seed", c.split_seed}}},
          {"standardize", c.standardize},
          {"methods", methods},
          {"report", {{"segment_length", c.report_segment_length}, {"validation_curves", c.validation_curves}}}};
}

std::unique_ptr<MultiStepForecaster> build_method(const MethodConfig& m, const SequenceConfig& sequence,
                                                  bool standardize) {
  std::unique_ptr<ForecastModel> base;
  if (m.kind == "mean") {
    base = std::make_unique<MeanBaseline>(m.mean_mode);
  } else if (m.kind == "last_value") {
    base = std::make_unique<LastValueBaseline>();
  } else if (m.kind == "linear") {
    base = std::make_unique<LinearModel>(m.ridge_epsilon);
  } else if (m.kind == "tree") {
    base = std::make_unique<RegressionTree>(m.max_leaf_samples);
  } else if (m.kind == "cnn") {
    base = std::make_unique<cnn::CnnForecaster>(m.cnn);
  } else {
    throw std::invalid_argument("unknown method kind '" + m.kind + "'");
  }
  HorizonPlan plan{m.strategy, sequence.alpha, sequence.horizon(), m.segment_length};
  return std::make_unique<MultiStepForecaster>(plan, std::move(base), standardize);
}

SplitData prepare_data(const ExperimentConfig& c) {
  TrajectoryDataset all = stage("data", [&] {
    return c.csv ? read_csv(*c.csv, c.sequence) : generate_synthetic(*c.synthetic, c.data_seed);
  });
  return stage("split", [&] {
    auto [train, test] = split_train_test(all, c.train_fraction, c.split_seed);
    if (train.empty() || test.empty()) throw std::invalid_argument("split leaves an empty partition");
    return SplitData{std::move(train), std::move(test)};
  });
}

std::vector<TrainedMethod> train_methods(const ExperimentConfig& c, const SplitData& data) {
  const auto train = samples_of(data.train);
  const auto validation = c.validation_curves ? samples_of(data.test) : std::vector<WindowSample>{};
  std::vector<TrainedMethod> out;
  for (const auto& m : c.methods) {
    stage("fit " + m.name, [&] {
      TrainedMethod t{m, build_method(m, c.sequence, c.standardize), 0.0};
      t.model->set_validation(validation);
      const auto start = std::chrono::steady_clock::now();
      t.model->fit_samples(train);
      t.fit_seconds = seconds_since(start);
      out.push_back(std::move(t));
      return 0;
    });
  }
  return out;
}

std::vector<NamedCurve> collect_curves(std::span<const TrainedMethod> trained) {
  std::vector<NamedCurve> curves;
  for (const auto& t : trained) {
    const auto logs = t.model->sub_model_logs();
    for (std::size_t j = 0; j < logs.size(); ++j) {
      if (logs[j].empty()) continue;
      const auto name = logs.size() == 1 ? t.method.name : t.method.name + "_seg" + std::to_string(j);
      curves.push_back({name, logs[j]});
    }
  }
  return curves;
}

std::vector<MethodResult> evaluate_methods(std::span<const MethodConfig> methods,
                                           std::span<const ForecastModel* const> models, const TrajectoryDataset& test,
                                           std::size_t segment_length) {
  if (methods.size() != models.size()) throw std::invalid_argument("one model per method expected");
  const auto& cfg = test.config();
  Forecasts truth;
  for (const auto& seq : test.sequences()) truth.push_back(seq.future(cfg.alpha));

  std::vector<MethodResult> results;
  for (std::size_t i = 0; i < methods.size(); ++i) {
    stage("evaluate " + methods[i].name, [&] {
      MethodResult r{methods[i].name, methods[i].kind, methods[i].strategy, 0.0, {}, 0.0};
      Forecasts pred;
      const auto start = std::chrono::steady_clock::now();
      for (std::size_t s = 0; s < test.size(); ++s) {
        auto f = models[i]->predict(test[s].past(cfg.alpha));
        if (f.size() != cfg.horizon()) {
          throw std::logic_error("forecast for test sequence " + std::to_string(s) + " has " +
                                 std::to_string(f.size()) + " steps, expected " + std::to_string(cfg.horizon()));
        }
        pred.push_back(std::move(f));
      }
      r.predict_seconds = seconds_since(start);
      r.mse = mse(pred, truth);
      r.segment_mse = per_horizon_mse(pred, truth, segment_length);
      results.push_back(std::move(r));
      return 0;
    });
  }
  return results;
}

void write_loss_log(const std::vector<LossRecord>& records, std::ostream& out) {
  out << "epoch,train_mse,val_mse\n";
  for (const auto& r : records) {
    out << r.epoch << ',' << format_double(r.train_mse) << ',' << (r.val_mse ? format_double(*r.val_mse) : "")
        << '\n';
  }
}

void emit_learning_curves(std::span<const NamedCurve> curves, const fs::path& dir) {
  if (curves.empty()) throw std::invalid_argument("no learning curves to write");
  fs::create_directories(dir / "curves");
  std::ostringstream combined;
  combined << "model,epoch,train_mse,val_mse\n";
  for (const auto& c : curves) {
    std::ostringstream one;
    write_loss_log(c.records, one);
    write_text(dir / "curves" / (c.model + ".csv"), one.str());
    for (const auto& r : c.records) {
      combined << c.model << ',' << r.epoch << ',' << format_double(r.train_mse) << ','
               << (r.val_mse ? format_double(*r.val_mse) : "") << '\n';
    }
  }
  write_text(dir / "learning_curves.csv", combined.str());
}

void write_report(const ExperimentReport& report, const fs::path& dir) {
  fs::create_directories(dir);
  const auto& seq = report.config.at("sequence");
  const auto alpha = seq.at("alpha").get<std::size_t>();
  const auto segment = report.config.at("report").at("segment_length").get<std::size_t>();

  json methods = json::array();
  std::ostringstream overall, horizon;
  overall << "method,kind,strategy,mse\n";
  horizon << "method,segment,start,end,mse\n";
  for (const auto& m : report.methods) {
    methods.push_back({{"name", m.name},
                       {"kind", m.kind},
                       {"strategy", to_string(m.strategy)},
                       {"mse", m.mse},
                       {"segment_mse", m.segment_mse}});
    overall << m.name << ',' << m.kind << ',' << to_string(m.strategy) << ',' << format_double(m.mse) << '\n';
    for (std::size_t j = 0; j < m.segment_mse.size(); ++j) {
      horizon << m.name << ',' << j << ',' << alpha + j * segment << ',' << alpha + (j + 1) * segment << ','
              << format_double(m.segment_mse[j]) << '\n';
    }
  }
  const json doc{{"config", report.config},
                 {"train_size", report.train_size},
                 {"test_size", report.test_size},
                 {"methods", methods}};
  write_text(dir / "report.json", doc.dump(2) + "\n");
  write_text(dir / "overall_mse.csv", overall.str());
  write_text(dir / "horizon_mse.csv", horizon.str());
  if (!report.curves.empty()) emit_learning_curves(report.curves, dir);

  json timing = json::object();
  for (const auto& [name, secs] : report.fit_seconds) timing[name]["fit_seconds"] = secs;
  for (const auto& m : report.methods) timing[m.name]["predict_seconds"] = m.predict_seconds;
  write_text(dir / "timing.json", timing.dump(2) + "\n");
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  auto out = stage("output", [&] { return std::make_unique<StagedDirectory>(config.output_dir); });
  const auto data = prepare_data(config);
  const auto trained = train_methods(config, data);

  std::vector<const ForecastModel*> models;
  for (const auto& t : trained) models.push_back(t.model.get());
  ExperimentReport report;
  report.config = to_json(config);
  report.train_size = data.train.size();
  report.test_size = data.test.size();
  report.methods = evaluate_methods(config.methods, models, data.test, config.report_segment_length);
  report.curves = collect_curves(trained);
  for (const auto& t : trained) report.fit_seconds.emplace_back(t.method.name, t.fit_seconds);

  stage("write", [&] {
    write_report(report, out->path());
    out->commit();
    return 0;
  });
  return report;
}

void train_and_save(const ExperimentConfig& config, const fs::path& dir) {
  auto out = stage("output", [&] { return std::make_unique<StagedDirectory>(dir); });
  const auto data = prepare_data(config);
  const auto trained = train_methods(config, data);
  stage("write", [&] {
    fs::create_directories(out->path() / "models");
    json timing = json::object();
    for (const auto& t : trained) {
      save_model(*t.model, out->path() / "models" / (t.method.name + ".json"));
      timing[t.method.name]["fit_seconds"] = t.fit_seconds;
    }
    const auto curves = collect_curves(trained);
    if (!curves.empty()) emit_learning_curves(curves, out->path());
    write_text(out->path() / "timing.json", timing.dump(2) + "\n");
    out->commit();
    return 0;
  });
}

ExperimentReport evaluate_saved(const ExperimentConfig& config, const fs::path& models_dir, const fs::path& out_dir) {
  auto out = stage("output", [&] { return std::make_unique<StagedDirectory>(out_dir); });
  const auto data = prepare_data(config);
  std::vector<std::unique_ptr<ForecastModel>> owned;
  std::vector<const ForecastModel*> models;
  for (const auto& m : config.methods) {
    stage("load " + m.name, [&] {
      auto path = models_dir / "models" / (m.name + ".json");
      if (!fs::exists(path)) path = models_dir / (m.name + ".json");
      owned.push_back(load_model(path));
      models.push_back(owned.back().get());
      return 0;
    });
  }
  ExperimentReport report;
  report.config = to_json(config);
  report.train_size = data.train.size();
  report.test_size = data.test.size();
  report.methods = evaluate_methods(config.methods, models, data.test, config.report_segment_length);
  stage("write", [&] {
    write_report(report, out->path());
    out->commit();
    return 0;
  });
  return report;
}

}  // namespace trajcast
