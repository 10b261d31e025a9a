#include "trajcast/track_quality.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>

#include "json.hpp"

#include "trajcast/csv_io.hpp"

namespace trajcast::quality {

Histogram histogram_of(std::span<const double> values, std::size_t bins, ValueRange range) {
  if (values.empty()) throw std::invalid_argument("histogram of an empty value list");
  if (bins == 0) throw std::invalid_argument("histogram needs at least one bin");
  if (!(range.hi > range.lo)) throw std::invalid_argument("histogram range must satisfy lo < hi");
  std::vector<double> counts(bins, kSmoothing);
  const double width = (range.hi - range.lo) / static_cast<double>(bins);
  for (double v : values) {
    if (std::isnan(v)) throw std::invalid_argument("histogram value is NaN");
    double pos = std::floor((v - range.lo) / width);
    pos = std::clamp(pos, 0.0, static_cast<double>(bins - 1));
    counts[static_cast<std::size_t>(pos)] += 1.0;
  }
  double total = 0.0;
  for (double c : counts) total += c;
  for (double& c : counts) c /= total;
  return {std::move(counts), range};
}

double kl_divergence(const Histogram& h1, const Histogram& h2) {
  if (h1.bins.size() != h2.bins.size()) {
    throw std::invalid_argument("kl_divergence: " + std::to_string(h1.bins.size()) + " vs " +
                                std::to_string(h2.bins.size()) + " bins");
  }
  double kl = 0.0;
  for (std::size_t i = 0; i < h1.bins.size(); ++i) {
    if (h1.bins[i] > 0.0) kl += h1.bins[i] * std::log(h1.bins[i] / h2.bins[i]);
  }
  return kl;
}

Histogram mean_histogram(std::span<const Histogram> group) {
  if (group.empty()) throw std::invalid_argument("mean of an empty histogram group");
  Histogram mean{std::vector<double>(group.front().bins.size(), 0.0), group.front().range};
  for (const auto& h : group) {
    if (h.bins.size() != mean.bins.size()) throw std::invalid_argument("histograms differ in bin count");
    for (std::size_t i = 0; i < h.bins.size(); ++i) mean.bins[i] += h.bins[i];
  }
  double total = 0.0;
  for (double b : mean.bins) total += b;
  for (double& b : mean.bins) b /= total;
  return mean;
}

QualityScore assess(const CropSet& crops) {
  if (crops.positive.empty()) throw std::invalid_argument("crop set has no positive crops");
  if (crops.negative.empty()) throw std::invalid_argument("crop set has no negative crops");
  if (crops.last.empty()) throw std::invalid_argument("crop set has no last-frame crops");
  const auto pos = mean_histogram(crops.positive);
  const auto neg = mean_histogram(crops.negative);
  QualityScore s;
  for (const auto& h : crops.last) {
    s.kl_pos += kl_divergence(h, pos);
    s.kl_neg += kl_divergence(h, neg);
  }
  s.kl_pos /= static_cast<double>(crops.last.size());
  s.kl_neg /= static_cast<double>(crops.last.size());
  s.failure = s.kl_pos > s.kl_neg;
  return s;
}

CropSet build_crop_set(const RawCropSet& raw, const QualityOptions& options) {
  if (options.frames == 0) throw std::invalid_argument("frames must be positive");
  auto hist = [&](const std::vector<double>& v) { return histogram_of(v, options.bins, options.range); };
  CropSet out;
  const std::size_t n_pos = std::min(options.frames, raw.positive.size());
  for (std::size_t i = 0; i < n_pos; ++i) out.positive.push_back(hist(raw.positive[i]));
  for (const auto& v : raw.negative) out.negative.push_back(hist(v));
  const std::size_t n_last = std::min(options.frames, raw.last.size());
  for (std::size_t i = raw.last.size() - n_last; i < raw.last.size(); ++i) out.last.push_back(hist(raw.last[i]));
  return out;
}

namespace {

std::vector<std::vector<double>> crop_group(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw std::invalid_argument(std::string("crop set is missing the '") + key + "' group");
  return j.at(key).get<std::vector<std::vector<double>>>();
}

}  // namespace

std::vector<RawCropSet> read_crop_sets(std::istream& in, QualityOptions& options) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("crop file is not valid JSON: ") + e.what());
  }
  const nlohmann::json* sets = &doc;
  if (doc.is_object()) {
    if (doc.contains("options")) {
      const auto& o = doc.at("options");
      options.frames = o.value("frames", options.frames);
      options.bins = o.value("bins", options.bins);
      if (o.contains("range")) options.range = {o.at("range").at(0).get<double>(), o.at("range").at(1).get<double>()};
    }
    sets = &doc.at("crop_sets");
  }
  if (!sets->is_array()) throw std::invalid_argument("crop file must hold a list of crop sets");
  std::vector<RawCropSet> out;
  for (std::size_t i = 0; i < sets->size(); ++i) {
    const auto& j = (*sets)[i];
    try {
      RawCropSet raw;
      if (j.contains("id")) {
        raw.id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
      } else {
        raw.id = std::to_string(i);
      }
      raw.positive = crop_group(j, "positive");
      raw.negative = crop_group(j, "negative");
      raw.last = crop_group(j, "last");
      out.push_back(std::move(raw));
    } catch (const std::exception& e) {
      throw std::invalid_argument("crop set " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

void write_quality_csv(std::ostream& out, std::span<const RawCropSet> sets, std::span<const QualityScore> scores) {
  if (sets.size() != scores.size()) throw std::invalid_argument("one score per crop set expected");
  out << "sequence_id,kl_pos,kl_neg,failure\n";
  for (std::size_t i = 0; i < sets.size(); ++i) {
    out << sets[i].id << ',' << format_double(scores[i].kl_pos) << ',' << format_double(scores[i].kl_neg) << ','
        << (scores[i].failure ? 1 : 0) << '\n';
  }
}

RawCropSet synthetic_crop_set(bool drift, std::uint64_t seed, std::size_t frames, std::size_t pixels) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * std::generate_canonical<double, 53>(rng); };
  auto crop = [&](double mean, double sd) {
    std::normal_distribution<double> d(mean, sd);
    std::vector<double> v(pixels);
    for (auto& x : v) x = std::clamp(d(rng), 0.0, 255.0);
    return v;
  };
  // A crop that is partly vehicle and partly the background behind it.
  auto mixed = [&](double vehicle_mean, double background_mean, double background_share) {
    auto v = crop(vehicle_mean, 18.0);
    const auto b = crop(background_mean, 14.0);
    const auto n_bg = static_cast<std::size_t>(std::round(background_share * static_cast<double>(pixels)));
    std::copy_n(b.begin(), n_bg, v.begin());
    return v;
  };

  const bool dark = uniform(0.0, 1.0) < 0.5;
  const double vehicle = dark ? uniform(25.0, 75.0) : uniform(180.0, 230.0);
  std::vector<double> neighbours(4);
  for (auto& m : neighbours) m = uniform(100.0, 155.0);

  RawCropSet raw;
  raw.id = (drift ? "drift_" : "stable_") + std::to_string(seed);
  for (std::size_t f = 0; f < frames; ++f) raw.positive.push_back(mixed(vehicle, neighbours[0], uniform(0.0, 0.1)));
  for (double m : neighbours) raw.negative.push_back(crop(m, 14.0));
  const double shift = uniform(-10.0, 10.0);
  const double background = neighbours[static_cast<std::size_t>(uniform(0.0, 4.0)) % 4];
  for (std::size_t f = 0; f < frames; ++f) {
    const double share = drift ? uniform(0.8, 1.0) : uniform(0.0, 0.3);
    raw.last.push_back(mixed(vehicle + shift, background, share));
  }
  return raw;
}

}  // namespace trajcast::quality
