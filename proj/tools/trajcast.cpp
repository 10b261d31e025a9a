#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "trajcast/csv_io.hpp"
#include "trajcast/experiment.hpp"
#include "trajcast/mil.hpp"
#include "trajcast/model_io.hpp"
#include "trajcast/synthetic.hpp"
#include "trajcast/track_quality.hpp"

namespace fs = std::filesystem;
using namespace trajcast;

namespace {

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void cmd_generate(const fs::path& spec_path, std::uint64_t seed, const fs::path& out) {
  const auto spec = synthetic_spec_from_json(read_json(spec_path));
  write_csv(generate_synthetic(spec, seed), out);
}

void cmd_predict(const fs::path& model_path, const fs::path& past_path, const fs::path& out_path) {
  const auto model = load_model(model_path);
  std::ifstream in(past_path);
  if (!in) throw std::runtime_error("cannot open " + past_path.string());
  const auto sequences = read_csv_sequences(in);
  const std::size_t alpha = model->input_steps();
  if (alpha == 0) throw std::runtime_error(model_path.string() + " holds an unfitted model");

  auto out = open_out(out_path);
  out << kTrajectoryCsvHeader << '\n';
  for (const auto& seq : sequences) {
    if (seq.points.size() < alpha) {
      throw std::runtime_error("vehicle " + std::to_string(seq.vehicle_id) + " window " +
                               std::to_string(seq.window_index) + " has " + std::to_string(seq.points.size()) +
                               " points, the model needs " + std::to_string(alpha));
    }
    const auto past = seq.past(alpha);
    const auto forecast = model->predict(past);
    for (std::size_t h = 0; h < forecast.size(); ++h) {
      out << seq.vehicle_id << ',' << seq.window_index << ',' << alpha + h << ',' << format_double(forecast[h].x)
          << ',' << format_double(forecast[h].y) << '\n';
    }
  }
  if (!out) throw std::runtime_error("failed writing " + out_path.string());
}

void cmd_quality(const fs::path& crops_path, const fs::path& out_path, quality::QualityOptions options) {
  std::ifstream in(crops_path);
  if (!in) throw std::runtime_error("cannot open " + crops_path.string());
  const auto sets = quality::read_crop_sets(in, options);
  std::vector<quality::QualityScore> scores;
  for (const auto& raw : sets) {
    try {
      scores.push_back(quality::assess(quality::build_crop_set(raw, options)));
    } catch (const std::exception& e) {
      throw std::runtime_error("crop set " + raw.id + ": " + e.what());
    }
  }
  auto out = open_out(out_path);
  quality::write_quality_csv(out, sets, scores);
}

void cmd_mil(const fs::path& stream_path, const fs::path& out_path, std::size_t K, std::size_t history,
             bool positive_only) {
  std::ifstream in(stream_path);
  if (!in) throw std::runtime_error("cannot open " + stream_path.string());
  const auto frames = mil::read_bag_stream(in);
  std::vector<mil::Bag> all;
  for (const auto& f : frames) {
    all.push_back(f.positive);
    all.insert(all.end(), f.negatives.begin(), f.negatives.end());
  }
  const auto candidates = mil::make_stump_candidates(all);
  if (candidates.empty()) throw std::runtime_error("bag stream has no feature with two distinct values");

  mil::OnlineMilTracker tracker(K, history, positive_only ? mil::Likelihood::positive_only : mil::Likelihood::bernoulli);
  auto out = open_out(out_path);
  out << "frame,positive_prob,max_negative_prob,terms\n";
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto& H = tracker.update(frames[i].positive, frames[i].negatives, candidates);
    double worst = 0.0;
    for (const auto& n : frames[i].negatives) worst = std::max(worst, mil::bag_probability(H, n));
    out << i << ',' << format_double(mil::bag_probability(H, frames[i].positive)) << ',' << format_double(worst)
        << ',' << H.terms.size() << '\n';
  }
}

std::string one_line(std::string s) {
  for (auto& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vehicle trajectory forecasting toolkit"};
  app.require_subcommand(1);

  std::string spec_path, out_path, config_path, models_dir, model_path, past_path, crops_path, stream_path;
  std::uint64_t seed = 42;

  auto* gen = app.add_subcommand("generate", "Write a synthetic trajectory dataset as CSV");
  gen->add_option("--spec", spec_path, "Synthetic spec JSON")->required();
  gen->add_option("--seed", seed, "Generator seed");
  gen->add_option("--out", out_path, "Output CSV")->required();

  auto* train = app.add_subcommand("train", "Fit every configured method and save the models");
  train->add_option("--config", config_path, "Experiment config JSON")->required();
  train->add_option("--out", out_path, "Output directory (defaults to the config's output_dir)");

  auto* eval = app.add_subcommand("eval", "Score saved models on the test split");
  eval->add_option("--config", config_path, "Experiment config JSON")->required();
  eval->add_option("--models", models_dir, "Directory written by train")->required();
  eval->add_option("--out", out_path, "Report directory")->required();

  auto* run = app.add_subcommand("run", "Train and evaluate in one go");
  run->add_option("--config", config_path, "Experiment config JSON")->required();
  run->add_option("--out", out_path, "Output directory (defaults to the config's output_dir)");

  auto* predict = app.add_subcommand("predict", "Forecast the horizon for each past window in a CSV");
  predict->add_option("--model", model_path, "Model JSON")->required();
  predict->add_option("--past", past_path, "Past windows CSV")->required();
  predict->add_option("--out", out_path, "Forecast CSV")->required();

  quality::QualityOptions qopts;
  auto* qual = app.add_subcommand("quality", "Flag tracking failures from crop histograms");
  qual->add_option("--crops", crops_path, "Crop sets JSON")->required();
  qual->add_option("--out", out_path, "Output CSV")->required();
  qual->add_option("--frames", qopts.frames, "Frames per group (F)");
  qual->add_option("--bins", qopts.bins, "Histogram bins (B)");

  std::size_t K = 10, history = 10;
  bool positive_only = false;
  auto* milcmd = app.add_subcommand("mil", "Run the online MIL classifier over a JSONL bag stream");
  milcmd->add_option("--stream", stream_path, "Bag stream (JSON lines)")->required();
  milcmd->add_option("--out", out_path, "Per-frame CSV")->required();
  milcmd->add_option("-K,--weak", K, "Stumps per classifier");
  milcmd->add_option("--history", history, "Frames of bags kept");
  milcmd->add_flag("--positive-only", positive_only, "Sum only positive-bag log-likelihood");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "trajcast: " << one_line(e.what()) << '\n';
    return e.get_exit_code() == 0 ? 2 : e.get_exit_code();
  }

  try {
    if (*gen) {
      cmd_generate(spec_path, seed, out_path);
    } else if (*train) {
      auto config = load_experiment_config(config_path);
      train_and_save(config, out_path.empty() ? config.output_dir : fs::path(out_path));
    } else if (*eval) {
      evaluate_saved(load_experiment_config(config_path), models_dir, out_path);
    } else if (*run) {
      auto config = load_experiment_config(config_path);
      if (!out_path.empty()) config.output_dir = out_path;
      run_experiment(config);
    } else if (*predict) {
      cmd_predict(model_path, past_path, out_path);
    } else if (*qual) {
      cmd_quality(crops_path, out_path, qopts);
    } else if (*milcmd) {
      cmd_mil(stream_path, out_path, K, history, positive_only);
    }
  } catch (const std::exception& e) {
    std::cerr << "trajcast: error: " << one_line(e.what()) << '\n';
    return 1;
  }
  return 0;
}
