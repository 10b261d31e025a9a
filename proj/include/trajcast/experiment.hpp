#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "trajcast/baselines.hpp"
#include "trajcast/cnn/cnn_forecaster.hpp"
#include "trajcast/metrics.hpp"
#include "trajcast/strategies.hpp"
#include "trajcast/synthetic.hpp"

namespace trajcast {

/// Failure inside one stage of an experiment; what() reads "<stage>: <cause>".
class ExperimentError : public std::runtime_error {
 public:
  ExperimentError(std::string stage, const std::string& cause)
      : std::runtime_error(stage + ": " + cause), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct MethodConfig {
  std::string name;
  std::string kind;  // mean | last_value | linear | tree | cnn
  Strategy strategy = Strategy::joint;
  std::size_t segment_length = 5;
  double ridge_epsilon = 1e-8;
  MeanBaseline::Mode mean_mode = MeanBaseline::Mode::per_window;
  std::size_t max_leaf_samples = 2;
  cnn::CnnOptions cnn;
};

struct ExperimentConfig {
  // Exactly one of synthetic / csv is set.
  std::optional<SyntheticSpec> synthetic;
  std::uint64_t data_seed = 42;
  std::optional<std::filesystem::path> csv;

  SequenceConfig sequence;
  double train_fraction = 0.8;
  std::uint64_t split_seed = 7;
  bool standardize = false;
  std::vector<MethodConfig> methods;
  std::size_t report_segment_length = 5;
  bool validation_curves = true;
  std::filesystem::path output_dir = "experiment_out";
};

/// A synthetic spec given as the string "standard", or an object that may
/// name "preset": "standard" and override any field.
SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j);

/// Relative paths in the config resolve against `base_dir`.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& config);

/// The model a method entry describes, already wrapped in its strategy.
std::unique_ptr<MultiStepForecaster> build_method(const MethodConfig& method, const SequenceConfig& sequence,
                                                  bool standardize);

struct SplitData {
  TrajectoryDataset train;
  TrajectoryDataset test;
};

SplitData prepare_data(const ExperimentConfig& config);

struct NamedCurve {
  std::string model;
  std::vector<LossRecord> records;
};

struct TrainedMethod {
  MethodConfig method;
  std::unique_ptr<MultiStepForecaster> model;
  double fit_seconds = 0.0;
};

struct MethodResult {
  std::string name;
  std::string kind;
  Strategy strategy = Strategy::joint;
  double mse = 0.0;
  std::vector<double> segment_mse;
  double predict_seconds = 0.0;
};

struct ExperimentReport {
  nlohmann::json config;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::vector<MethodResult> methods;
  std::vector<NamedCurve> curves;
  std::vector<std::pair<std::string, double>> fit_seconds;
};

/// Fits every configured method on `data.train`.
std::vector<TrainedMethod> train_methods(const ExperimentConfig& config, const SplitData& data);

/// Learning curves of the trained models: `<name>` for single-model plans and
/// `<name>_seg<j>` for independent ones. Closed-form models are skipped.
std::vector<NamedCurve> collect_curves(std::span<const TrainedMethod> trained);

/// Scores fitted models on the test split; checks every forecast's shape.
std::vector<MethodResult> evaluate_methods(std::span<const MethodConfig> methods,
                                           std::span<const ForecastModel* const> models, const TrajectoryDataset& test,
                                           std::size_t segment_length);

/// report.json, overall_mse.csv, horizon_mse.csv and, when curves exist, the
/// learning curves. Wall-clock goes to timing.json only, so the other files
/// are identical across runs.
void write_report(const ExperimentReport& report, const std::filesystem::path& dir);

/// One `curves/<model>.csv` per curve plus `learning_curves.csv` with a
/// leading `model` column. Throws std::invalid_argument when `curves` is empty.
void emit_learning_curves(std::span<const NamedCurve> curves, const std::filesystem::path& dir);

void write_loss_log(const std::vector<LossRecord>& records, std::ostream& out);

/// Loads or generates the data, splits, fits, evaluates and writes every
/// output to config.output_dir. On failure nothing is left behind in the
/// output directory and an ExperimentError names the stage.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Fits and saves `models/<name>.json` plus the learning curves.
void train_and_save(const ExperimentConfig& config, const std::filesystem::path& dir);

/// Loads `models/<name>.json` (or `<name>.json`) for every method from
/// `models_dir` and writes the report to `out_dir`.
ExperimentReport evaluate_saved(const ExperimentConfig& config, const std::filesystem::path& models_dir,
                                const std::filesystem::path& out_dir);

}  // namespace trajcast
