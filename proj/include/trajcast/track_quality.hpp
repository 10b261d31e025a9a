#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace trajcast::quality {

struct ValueRange {
  double lo = 0.0;
  double hi = 255.0;
};

struct Histogram {
  std::vector<double> bins;
  ValueRange range;
};

inline constexpr double kSmoothing = 1e-6;

/// Equal-width bins over `range`; out-of-range values land in the end bins.
/// Each bin gets kSmoothing added to its count before normalization.
Histogram histogram_of(std::span<const double> values, std::size_t bins = 32, ValueRange range = {});

/// Sum of h1 * ln(h1 / h2); zero-mass bins of h1 contribute nothing.
double kl_divergence(const Histogram& h1, const Histogram& h2);

/// Bin-wise mean of the group, renormalized.
Histogram mean_histogram(std::span<const Histogram> group);

struct CropSet {
  std::vector<Histogram> positive;  // vehicle crop, first frames
  std::vector<Histogram> negative;  // neighbouring background crops, first frame
  std::vector<Histogram> last;      // vehicle crop, last frames
};

struct QualityScore {
  double kl_pos = 0.0;
  double kl_neg = 0.0;
  bool failure = false;
};

/// Mean KL of each last-frame histogram against the positive and negative
/// group means; a failure when the positive side is strictly larger.
QualityScore assess(const CropSet& crops);
inline bool failure_decision(const CropSet& crops) { return assess(crops).failure; }

struct QualityOptions {
  std::size_t frames = 5;  // F
  std::size_t bins = 32;   // B
  ValueRange range;
};

/// Raw pixel values per crop, as stored on disk.
struct RawCropSet {
  std::string id;
  std::vector<std::vector<double>> positive;
  std::vector<std::vector<double>> negative;
  std::vector<std::vector<double>> last;
};

/// Histograms of the first F positive crops, all negative crops and the last F
/// last-frame crops.
CropSet build_crop_set(const RawCropSet& raw, const QualityOptions& options = {});

/// JSON: either a list of crop sets or {"options": {...}, "crop_sets": [...]}.
/// Each crop set is {"id": ..., "positive": [[v...], ...], "negative": [...], "last": [...]}.
/// Options in the file (frames, bins, range) override `options`.
std::vector<RawCropSet> read_crop_sets(std::istream& in, QualityOptions& options);

void write_quality_csv(std::ostream& out, std::span<const RawCropSet> sets, std::span<const QualityScore> scores);

/// Synthetic crop sets for testing the detector. A stable set keeps the
/// vehicle's appearance to the end; a drifting set ends with 80-100% of the
/// crop on one background region.
RawCropSet synthetic_crop_set(bool drift, std::uint64_t seed, std::size_t frames = 5, std::size_t pixels = 400);

}  // namespace trajcast::quality
