#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"

#include "trajcast/csv_io.hpp"
#include "trajcast/experiment.hpp"

using namespace trajcast;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("trajcast_test_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t lines(const fs::path& p) {
  const auto text = slurp(p);
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

json small_config(const fs::path& out) {
  return {{"data", {{"synthetic", {{"constant_velocity", 12}, {"lane_change", 6}, {"circular_arc", 4}, {"stationary", 4}}},
                    {"seed", 3}}},
          {"split", {{"train_fraction", 0.75}, {"seed", 2}}},
          {"standardize", true},
          {"methods",
           {"mean", "last_value", "linear", "tree",
            {{"kind", "cnn"},
             {"cnn", {{"architecture", {{"conv_filters", {3, 3}}, {"dense_dims", {8}}}}, {"epochs", 6},
                      {"validation_every", 2}}}},
            {{"name", "cnn_ind"},
             {"kind", "cnn"},
             {"strategy", "independent"},
             {"cnn", {{"architecture", {{"conv_filters", {3}}, {"dense_dims", {4}}}}, {"epochs", 3}}}}}},
          {"output_dir", out.string()}};
}

}  // namespace

TEST_CASE("config parsing, defaults and validation") {
  const auto d = experiment_config_from_json(json::object());
  REQUIRE(d.synthetic.has_value());
  CHECK(d.synthetic->constant_velocity.count == 200);
  CHECK(d.data_seed == 42);
  CHECK(d.train_fraction == 0.8);
  CHECK(d.split_seed == 7);
  CHECK(d.methods.size() == 6);
  CHECK(d.methods[4].name == "cnn_joint");
  CHECK(d.methods[5].strategy == Strategy::independent);
  CHECK(d.methods[4].cnn.architecture.conv_filters == std::vector<std::size_t>{8, 16, 32});
  CHECK(d.methods[4].cnn.training.epochs == 2000);

  const auto c = experiment_config_from_json(json{{"data", {{"csv", "tracks.csv"}}}, {"output_dir", "out"}}, "/base");
  CHECK(*c.csv == fs::path("/base/tracks.csv"));
  CHECK(c.output_dir == fs::path("/base/out"));

  CHECK_THROWS(experiment_config_from_json(json{{"methods", {"mean", "mean"}}}));
  CHECK_THROWS(experiment_config_from_json(json{{"methods", {"forest"}}}));
  CHECK_THROWS(experiment_config_from_json(
      json{{"methods", {{{"kind", "cnn"}, {"strategy", "independent"}, {"segment_length", 7}}}}}));
  CHECK_THROWS(experiment_config_from_json(json{{"data", {{"csv", "a.csv"}, {"synthetic", "standard"}}}}));

  const auto echo = to_json(experiment_config_from_json(small_config("x")));
  CHECK(experiment_config_from_json(echo).methods.size() == 6);
  CHECK(to_json(experiment_config_from_json(echo)) == echo);
}

TEST_CASE("mean and last value score zero on noise-free stationary data") {
  TempDir tmp("stationary");
  const json cfg{{"data", {{"synthetic", {{"noise_sigma", 0.0}, {"stationary", 20}}}, {"seed", 1}}},
                 {"methods", {"mean", "last_value"}},
                 {"output_dir", (tmp.path / "out").string()}};
  const auto report = run_experiment(experiment_config_from_json(cfg));
  REQUIRE(report.methods.size() == 2);
  for (const auto& m : report.methods) {
    CHECK(m.mse == 0.0);
    CHECK(m.segment_mse == std::vector<double>(5, 0.0));
  }
  CHECK(report.train_size == 16);
  CHECK(report.test_size == 4);
}

TEST_CASE("experiment outputs: files, curves, segment identity, determinism") {
  TempDir tmp("full");
  const auto a_dir = tmp.path / "a", b_dir = tmp.path / "b";
  const auto report = run_experiment(experiment_config_from_json(small_config(a_dir)));
  run_experiment(experiment_config_from_json(small_config(b_dir)));

  REQUIRE(report.methods.size() == 6);
  for (const auto& m : report.methods) {
    REQUIRE(m.segment_mse.size() == 5);
    const double mean = std::accumulate(m.segment_mse.begin(), m.segment_mse.end(), 0.0) / 5.0;
    CHECK(std::abs(mean - m.mse) <= 1e-9 * std::max(1.0, m.mse));
  }

  for (const char* f : {"report.json", "overall_mse.csv", "horizon_mse.csv", "learning_curves.csv", "timing.json"}) {
    CHECK(fs::exists(a_dir / f));
  }
  CHECK(lines(a_dir / "overall_mse.csv") == 7);
  CHECK(lines(a_dir / "horizon_mse.csv") == 31);
  CHECK(slurp(a_dir / "overall_mse.csv").rfind("method,kind,strategy,mse\n", 0) == 0);
  CHECK(slurp(a_dir / "horizon_mse.csv").find("\nmean_joint,0,25,30,") != std::string::npos);

  CHECK(lines(a_dir / "curves" / "cnn_joint.csv") == 7);
  std::size_t per_model = 0;
  for (int j = 0; j < 5; ++j) {
    const auto p = a_dir / "curves" / ("cnn_ind_seg" + std::to_string(j) + ".csv");
    REQUIRE(fs::exists(p));
    per_model += lines(p) - 1;
  }
  per_model += lines(a_dir / "curves" / "cnn_joint.csv") - 1;
  CHECK(lines(a_dir / "learning_curves.csv") - 1 == per_model);
  std::istringstream curve(slurp(a_dir / "curves" / "cnn_joint.csv"));
  std::string line;
  std::getline(curve, line);
  CHECK(line == "epoch,train_mse,val_mse");
  long previous = 0;
  while (std::getline(curve, line)) {
    const long epoch = std::stol(line.substr(0, line.find(',')));
    CHECK(epoch > previous);
    previous = epoch;
  }

  for (const auto& entry : fs::recursive_directory_iterator(a_dir)) {
    if (!entry.is_regular_file() || entry.path().filename() == "timing.json") continue;
    const auto twin = b_dir / fs::relative(entry.path(), a_dir);
    INFO(entry.path().string());
    CHECK(slurp(entry.path()) == slurp(twin));
  }
  const auto doc = json::parse(slurp(a_dir / "report.json"));
  CHECK(doc.at("methods").size() == 6);
  CHECK(doc.at("config").at("methods").size() == 6);
}

TEST_CASE("learning curve emission") {
  TempDir tmp("curves");
  const std::vector<NamedCurve> one{{"m", {{1, 3.0, std::nullopt}, {2, 2.0, 5.0}, {3, 1.0, 4.0}}}};
  emit_learning_curves(one, tmp.path);
  CHECK(lines(tmp.path / "curves" / "m.csv") == 4);
  CHECK(slurp(tmp.path / "curves" / "m.csv") == "epoch,train_mse,val_mse\n1,3,\n2,2,5\n3,1,4\n");
  CHECK(slurp(tmp.path / "learning_curves.csv").rfind("model,epoch,train_mse,val_mse\nm,1,3,\n", 0) == 0);
  CHECK_THROWS_AS(emit_learning_curves(std::vector<NamedCurve>{}, tmp.path), std::invalid_argument);
}

TEST_CASE("a failing stage is named and leaves no output behind") {
  TempDir tmp("failure");
  const auto out = tmp.path / "out";
  json missing{{"data", {{"csv", (tmp.path / "nope.csv").string()}}}, {"methods", {"mean"}}, {"output_dir", out.string()}};
  try {
    run_experiment(experiment_config_from_json(missing));
    FAIL("expected a data error");
  } catch (const ExperimentError& e) {
    CHECK(e.stage() == "data");
  }
  CHECK_FALSE(fs::exists(out));

  json singular{{"data", {{"synthetic", {{"noise_sigma", 0.0}, {"stationary", 10}}}}},
                {"methods", {"mean", {{"kind", "linear"}, {"ridge_epsilon", 0.0}}}},
                {"output_dir", out.string()}};
  try {
    run_experiment(experiment_config_from_json(singular));
    FAIL("expected a fit error");
  } catch (const ExperimentError& e) {
    CHECK(e.stage() == "fit linear_joint");
  }
  CHECK_FALSE(fs::exists(out));
  CHECK(std::distance(fs::directory_iterator(tmp.path), fs::directory_iterator{}) == 0);

  fs::create_directories(out);
  std::ofstream(out / "keep.txt") << "previous";
  CHECK_THROWS_AS(run_experiment(experiment_config_from_json(singular)), ExperimentError);
  CHECK(slurp(out / "keep.txt") == "previous");
}

TEST_CASE("train, save and evaluate reproduce the direct run") {
  TempDir tmp("saved");
  auto cfg = experiment_config_from_json(small_config(tmp.path / "direct"));
  const auto direct = run_experiment(cfg);
  train_and_save(cfg, tmp.path / "trained");
  CHECK(fs::exists(tmp.path / "trained" / "models" / "cnn_ind.json"));
  CHECK(fs::exists(tmp.path / "trained" / "learning_curves.csv"));
  const auto saved = evaluate_saved(cfg, tmp.path / "trained", tmp.path / "report");
  REQUIRE(saved.methods.size() == direct.methods.size());
  for (std::size_t i = 0; i < saved.methods.size(); ++i) {
    CHECK(saved.methods[i].mse == direct.methods[i].mse);
    CHECK(saved.methods[i].segment_mse == direct.methods[i].segment_mse);
  }
  CHECK(slurp(tmp.path / "report" / "overall_mse.csv") == slurp(tmp.path / "direct" / "overall_mse.csv"));
  CHECK_THROWS_AS(evaluate_saved(cfg, tmp.path / "nowhere", tmp.path / "r2"), ExperimentError);
  CHECK_FALSE(fs::exists(tmp.path / "r2"));
}

TEST_CASE("CSV data source") {
  TempDir tmp("csv");
  SyntheticSpec spec;
  spec.constant_velocity.count = 10;
  write_csv(generate_synthetic(spec, 4), tmp.path / "tracks.csv");
  const json cfg{{"data", {{"csv", "tracks.csv"}}}, {"methods", {"last_value", "linear"}}, {"output_dir", "out"}};
  std::ofstream(tmp.path / "exp.json") << cfg.dump();
  const auto report = run_experiment(load_experiment_config(tmp.path / "exp.json"));
  CHECK(report.train_size + report.test_size == 10);
  CHECK(fs::exists(tmp.path / "out" / "report.json"));
}
