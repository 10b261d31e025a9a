#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "trajcast/csv_io.hpp"
#include "trajcast/mil.hpp"
#include "trajcast/synthetic.hpp"
#include "trajcast/track_quality.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code = 0;
  std::string err;
};

const fs::path& workdir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "trajcast_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Result cli(const std::string& args) {
  const auto err = workdir() / "stderr.txt";
  const std::string cmd = "cd '" + workdir().string() + "' && '" TRAJCAST_CLI "' " + args + " >/dev/null 2>'" +
                          err.string() + "'";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(err)};
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

bool one_line(const std::string& s) { return !s.empty() && s.find('\n') == s.size() - 1; }

}  // namespace

TEST_CASE("generate writes the dataset the library generates") {
  write(workdir() / "spec.json", R"({"constant_velocity": 3, "stationary": 2})");
  const auto r = cli("generate --spec spec.json --seed 5 --out data.csv");
  CHECK(r.code == 0);
  CHECK(r.err.empty());
  trajcast::SyntheticSpec spec;
  spec.constant_velocity.count = 3;
  spec.stationary.count = 2;
  std::ostringstream expected;
  trajcast::write_csv(trajcast::generate_synthetic(spec, 5), expected);
  CHECK(slurp(workdir() / "data.csv") == expected.str());
}

TEST_CASE("train, eval and predict") {
  const json cfg{{"data", {{"synthetic", {{"constant_velocity", 10}, {"lane_change", 4}}}, {"seed", 1}}},
                 {"methods", {"last_value", "linear"}},
                 {"output_dir", "trained"}};
  write(workdir() / "exp.json", cfg.dump());
  CHECK(cli("train --config exp.json").code == 0);
  CHECK(fs::exists(workdir() / "trained" / "models" / "linear_joint.json"));
  CHECK(cli("eval --config exp.json --models trained --out report").code == 0);
  const auto overall = slurp(workdir() / "report" / "overall_mse.csv");
  CHECK(overall.rfind("method,kind,strategy,mse\n", 0) == 0);
  CHECK(overall.find("linear_joint,linear,joint,") != std::string::npos);
  CHECK(fs::exists(workdir() / "report" / "horizon_mse.csv"));

  CHECK(cli("generate --spec spec.json --seed 9 --out past.csv").code == 0);
  CHECK(cli("predict --model trained/models/last_value_joint.json --past past.csv --out pred.csv").code == 0);
  const auto pred = slurp(workdir() / "pred.csv");
  std::istringstream lines(pred);
  std::string header;
  std::getline(lines, header);
  CHECK(header == trajcast::kTrajectoryCsvHeader);
  CHECK(std::count(pred.begin(), pred.end(), '\n') == 1 + 5 * 25);
}

TEST_CASE("quality and mil subcommands") {
  json sets = json::array();
  for (std::uint64_t s = 0; s < 4; ++s) {
    const auto raw = trajcast::quality::synthetic_crop_set(s % 2 == 0, s);
    sets.push_back({{"id", raw.id}, {"positive", raw.positive}, {"negative", raw.negative}, {"last", raw.last}});
  }
  write(workdir() / "crops.json", sets.dump());
  CHECK(cli("quality --crops crops.json --out quality.csv").code == 0);
  const auto q = slurp(workdir() / "quality.csv");
  CHECK(q.rfind("sequence_id,kl_pos,kl_neg,failure\n", 0) == 0);
  CHECK(std::count(q.begin(), q.end(), '\n') == 5);

  write(workdir() / "bags.jsonl",
        "{\"positive\": [[0.9, 0.1], [0.2, 0.5]], \"negatives\": [[0.1, 0.3], [0.2, 0.9]]}\n"
        "{\"positive\": [[0.8, 0.4]], \"negatives\": [[0.3, 0.2]]}\n");
  CHECK(cli("mil --stream bags.jsonl --out mil.csv -K 2").code == 0);
  const auto m = slurp(workdir() / "mil.csv");
  CHECK(m.rfind("frame,positive_prob,max_negative_prob,terms\n", 0) == 0);
  CHECK(std::count(m.begin(), m.end(), '\n') == 3);
}

TEST_CASE("failures exit non-zero with one stderr line") {
  for (const char* args : {"", "bogus", "generate --spec spec.json", "generate --spec missing.json --out x.csv",
                           "train --config missing.json", "predict --model missing.json --past past.csv --out p.csv",
                           "quality --crops missing.json --out q.csv", "eval --config exp.json --models nowhere --out r"}) {
    const auto r = cli(args);
    INFO("args: " << args << " stderr: " << r.err);
    CHECK(r.code != 0);
    CHECK(one_line(r.err));
  }
  write(workdir() / "bad.json", "{\"data\": {\"csv\": \"nope.csv\"}, \"methods\": [\"mean\"], \"output_dir\": \"bad_out\"}");
  const auto r = cli("run --config bad.json");
  CHECK(r.code != 0);
  CHECK(one_line(r.err));
  CHECK(r.err.find("data") != std::string::npos);
  CHECK_FALSE(fs::exists(workdir() / "bad_out"));
}
