#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"

#include "trajcast/track_quality.hpp"

using namespace trajcast::quality;

namespace {

Histogram hist(std::vector<double> bins) { return {std::move(bins), {}}; }

Histogram random_histogram(std::mt19937_64& rng, std::size_t bins) {
  std::uniform_real_distribution<double> u(0.0, 255.0);
  std::vector<double> values(1 + rng() % 50);
  for (auto& v : values) v = u(rng);
  return histogram_of(values, bins);
}

CropSet crop_set(std::vector<double> pos, std::vector<double> neg, std::vector<double> last) {
  return {{hist(pos)}, {hist(neg)}, {hist(last)}};
}

Histogram permuted(const Histogram& h, const std::vector<std::size_t>& perm) {
  Histogram out = h;
  for (std::size_t i = 0; i < perm.size(); ++i) out.bins[i] = h.bins[perm[i]];
  return out;
}

}  // namespace

TEST_CASE("histogram examples") {
  const std::vector<double> three{0.1, 0.1, 0.9};
  const auto h = histogram_of(three, 2, {0.0, 1.0});
  CHECK(h.bins[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-5));
  CHECK(h.bins[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-5));

  const std::vector<double> uniform{10, 60, 140, 200};
  const auto u = histogram_of(uniform, 2);
  CHECK(u.bins[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(u.bins[1] == doctest::Approx(0.5).epsilon(1e-12));

  const std::vector<double> same(10, 77.0);
  const auto one = histogram_of(same, 32);
  CHECK(one.bins[77 * 32 / 256] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(std::accumulate(one.bins.begin(), one.bins.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(*std::min_element(one.bins.begin(), one.bins.end()) > 0.0);
}

TEST_CASE("histogram clips out-of-range values to the end bins") {
  const std::vector<double> v{-50.0, 0.0, 255.0, 900.0};
  const auto h = histogram_of(v, 4);
  CHECK(h.bins[0] == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(h.bins[3] == doctest::Approx(0.5).epsilon(1e-5));
}

TEST_CASE("histogram errors") {
  const std::vector<double> v{1.0};
  CHECK_THROWS_AS(histogram_of(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(histogram_of(v, 0), std::invalid_argument);
  CHECK_THROWS_AS(histogram_of(v, 4, {3.0, 3.0}), std::invalid_argument);
  CHECK_THROWS_AS(histogram_of(std::vector<double>{std::nan("")}), std::invalid_argument);
}

TEST_CASE("histogram is invariant to the order of values") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-20.0, 280.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(1 + rng() % 100);
    for (auto& x : v) x = u(rng);
    const auto a = histogram_of(v, 16);
    std::shuffle(v.begin(), v.end(), rng);
    CHECK(histogram_of(v, 16).bins == a.bins);
  }
}

TEST_CASE("kl divergence examples") {
  const auto p = hist({0.5, 0.5}), q = hist({0.25, 0.75});
  CHECK(kl_divergence(p, p) == 0.0);
  CHECK(kl_divergence(p, q) == doctest::Approx(0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0)).epsilon(1e-14));
  CHECK(kl_divergence(p, q) == doctest::Approx(0.1438).epsilon(1e-3));
  CHECK(kl_divergence(p, q) != doctest::Approx(kl_divergence(q, p)));
  CHECK(kl_divergence(hist({0.0, 1.0}), hist({0.5, 0.5})) == doctest::Approx(std::log(2.0)));
  CHECK_THROWS_AS(kl_divergence(p, hist({0.2, 0.3, 0.5})), std::invalid_argument);
}

TEST_CASE("kl divergence is non-negative, zero iff equal, and matches brute force") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_histogram(rng, 8), b = random_histogram(rng, 8);
    const double d = kl_divergence(a, b);
    CHECK(d >= 0.0);
    CHECK(kl_divergence(a, a) == 0.0);
    CHECK(std::abs(d - oracle::kl(a.bins, b.bins)) < 1e-9);
    double gap = 0.0;
    for (std::size_t i = 0; i < 8; ++i) gap = std::max(gap, std::abs(a.bins[i] - b.bins[i]));
    if (gap > 1e-9) CHECK(d > 0.0);
  }
}

TEST_CASE("mean histogram renormalizes") {
  const std::vector<Histogram> g{hist({0.2, 0.8}), hist({0.6, 0.4})};
  const auto m = mean_histogram(g);
  CHECK(m.bins[0] == doctest::Approx(0.4));
  CHECK(m.bins[1] == doctest::Approx(0.6));
  CHECK_THROWS(mean_histogram(std::vector<Histogram>{}));
}

TEST_CASE("failure decision examples") {
  CHECK_FALSE(failure_decision(crop_set({0.7, 0.2, 0.1}, {0.1, 0.2, 0.7}, {0.7, 0.2, 0.1})));
  CHECK(failure_decision(crop_set({0.7, 0.2, 0.1}, {0.1, 0.2, 0.7}, {0.1, 0.2, 0.7})));
  CHECK_FALSE(failure_decision(crop_set({0.3, 0.3, 0.4}, {0.3, 0.3, 0.4}, {0.1, 0.2, 0.7})));
  const auto s = assess(crop_set({0.7, 0.2, 0.1}, {0.1, 0.2, 0.7}, {0.1, 0.2, 0.7}));
  CHECK(s.kl_neg == 0.0);
  CHECK(s.kl_pos > 0.0);
  CHECK_THROWS_AS(assess({{}, {hist({1.0})}, {hist({1.0})}}), std::invalid_argument);
  CHECK_THROWS_AS(assess({{hist({1.0})}, {}, {hist({1.0})}}), std::invalid_argument);
  CHECK_THROWS_AS(assess({{hist({1.0})}, {hist({1.0})}, {}}), std::invalid_argument);
}

TEST_CASE("failure decision is invariant to a common bin permutation") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    CropSet c;
    for (int i = 0; i < 5; ++i) c.positive.push_back(random_histogram(rng, 12));
    for (int i = 0; i < 4; ++i) c.negative.push_back(random_histogram(rng, 12));
    for (int i = 0; i < 5; ++i) c.last.push_back(random_histogram(rng, 12));
    std::vector<std::size_t> perm(12);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    CropSet p;
    for (const auto& h : c.positive) p.positive.push_back(permuted(h, perm));
    for (const auto& h : c.negative) p.negative.push_back(permuted(h, perm));
    for (const auto& h : c.last) p.last.push_back(permuted(h, perm));
    const auto a = assess(c), b = assess(p);
    CHECK(a.failure == b.failure);
    CHECK(a.kl_pos == doctest::Approx(b.kl_pos).epsilon(1e-12));
    CHECK(a.kl_neg == doctest::Approx(b.kl_neg).epsilon(1e-12));
  }
}

TEST_CASE("build crop set takes the first and last F frames") {
  RawCropSet raw;
  raw.id = "s";
  for (int i = 0; i < 8; ++i) raw.positive.push_back({static_cast<double>(i * 30)});
  raw.negative = {{1.0}, {2.0}, {3.0}, {4.0}};
  for (int i = 0; i < 8; ++i) raw.last.push_back({static_cast<double>(i * 30)});
  QualityOptions opts;
  opts.frames = 3;
  opts.bins = 16;
  const auto c = build_crop_set(raw, opts);
  REQUIRE(c.positive.size() == 3);
  REQUIRE(c.last.size() == 3);
  CHECK(c.negative.size() == 4);
  CHECK(c.positive[0].bins == histogram_of(raw.positive[0], 16).bins);
  CHECK(c.last[0].bins == histogram_of(raw.last[5], 16).bins);
}

TEST_CASE("crop set JSON reader and CSV writer") {
  std::istringstream in(R"({"options": {"frames": 2, "bins": 4},
    "crop_sets": [{"id": "a", "positive": [[10, 20], [15]], "negative": [[200, 210]], "last": [[12], [18]]},
                  {"id": "b", "positive": [[10, 20]], "negative": [[200, 210]], "last": [[205]]}]})");
  QualityOptions opts;
  const auto sets = read_crop_sets(in, opts);
  CHECK(opts.frames == 2);
  CHECK(opts.bins == 4);
  REQUIRE(sets.size() == 2);
  CHECK(sets[1].id == "b");
  std::vector<QualityScore> scores;
  for (const auto& s : sets) scores.push_back(assess(build_crop_set(s, opts)));
  CHECK_FALSE(scores[0].failure);
  CHECK(scores[1].failure);
  std::ostringstream out;
  write_quality_csv(out, sets, scores);
  const auto text = out.str();
  CHECK(text.rfind("sequence_id,kl_pos,kl_neg,failure\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
  CHECK(text.find("\nb,") != std::string::npos);
  CHECK(text.substr(text.size() - 3) == ",1\n");

  std::istringstream list(R"([{"id": "x", "positive": [[1]], "negative": [[2]], "last": [[3]]}])");
  QualityOptions defaults;
  CHECK(read_crop_sets(list, defaults).size() == 1);
  CHECK(defaults.bins == 32);
  std::istringstream missing(R"([{"id": "x", "positive": [[1]], "last": [[3]]}])");
  CHECK_THROWS(read_crop_sets(missing, defaults));
}

TEST_CASE("synthetic crop sets are deterministic and mostly classified correctly") {
  const auto a = synthetic_crop_set(true, 9);
  const auto b = synthetic_crop_set(true, 9);
  CHECK(a.positive == b.positive);
  CHECK(a.last == b.last);
  CHECK(a.negative.size() == 4);
  int correct = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const bool drift = seed % 2 == 0;
    correct += failure_decision(build_crop_set(synthetic_crop_set(drift, seed))) == drift;
  }
  CHECK(correct >= 38);
}
