#pragma once

#include <cstddef>
#include <deque>
#include <istream>
#include <span>
#include <vector>

namespace trajcast::mil {

using Instance = std::vector<double>;

struct Bag {
  std::vector<Instance> instances;
  int label = 0;  // 0 or 1
};

/// Decision stump: +1 when polarity * (x[feature] - threshold) > 0, else -1.
struct WeakClassifier {
  std::size_t feature = 0;
  double threshold = 0.0;
  int polarity = 1;

  double operator()(std::span<const double> x) const;

  friend bool operator==(const WeakClassifier&, const WeakClassifier&) = default;
};

struct WeightedStump {
  double lambda = 0.0;
  WeakClassifier h;

  friend bool operator==(const WeightedStump&, const WeightedStump&) = default;
};

struct StrongClassifier {
  std::vector<WeightedStump> terms;

  double score(std::span<const double> x) const;

  friend bool operator==(const StrongClassifier&, const StrongClassifier&) = default;
};

double sigmoid(double z);

double instance_probability(const StrongClassifier& H, std::span<const double> x);

/// Noisy-OR. Throws std::invalid_argument on an empty bag.
double bag_probability(const StrongClassifier& H, const Bag& bag);
double noisy_or(std::span<const double> instance_probabilities);

enum class Likelihood { bernoulli, positive_only };

inline constexpr double kProbabilityClamp = 1e-12;

/// Sum over bags of y log p + (1 - y) log(1 - p), p clamped away from 0 and 1.
/// The positive_only form drops the negative-bag terms.
double bag_log_likelihood(const StrongClassifier& H, std::span<const Bag> bags,
                          Likelihood form = Likelihood::bernoulli);

/// The fixed step grid searched for each new stump weight: 0.1, 0.2, ..., 1.0.
std::vector<double> lambda_grid();

struct SelectionTrace {
  std::vector<double> log_likelihood;  // after each addition
};

/// Greedy forward selection of K stumps. Ties keep the lowest candidate
/// index, then the smallest lambda.
StrongClassifier greedy_select(std::span<const WeakClassifier> candidates, std::span<const Bag> bags, std::size_t K,
                               Likelihood form = Likelihood::bernoulli, SelectionTrace* trace = nullptr);

/// Stumps at every midpoint between consecutive distinct values of every
/// feature, each with both polarities.
std::vector<WeakClassifier> make_stump_candidates(std::span<const Bag> bags);

/// One frame of a bag stream.
struct FrameBags {
  Bag positive;
  std::vector<Bag> negatives;
};

/// Reads JSON lines of the form {"positive": [[...], ...], "negatives": [...]}.
/// Every `negatives` element is either a feature vector (a one-instance bag) or
/// a list of feature vectors. Blank lines are skipped.
std::vector<FrameBags> read_bag_stream(std::istream& in);

/// Keeps the bags of the most recent frames and reselects the classifier on
/// every update.
class OnlineMilTracker {
 public:
  explicit OnlineMilTracker(std::size_t K = 10, std::size_t history_frames = 10,
                            Likelihood form = Likelihood::bernoulli);

  /// Throws std::invalid_argument when `negatives` is empty.
  const StrongClassifier& update(const Bag& positive, std::span<const Bag> negatives,
                                 std::span<const WeakClassifier> candidates);

  const StrongClassifier& classifier() const { return classifier_; }
  std::vector<Bag> history_bags() const;

 private:
  std::size_t K_;
  std::size_t history_frames_;
  Likelihood form_;
  std::deque<FrameBags> history_;
  StrongClassifier classifier_;
};

/// Stateless form: reselect over the new frame plus `history` (oldest first).
StrongClassifier online_update(const Bag& positive, std::span<const Bag> negatives,
                               std::span<const Bag> history, std::span<const WeakClassifier> candidates,
                               std::size_t K, Likelihood form = Likelihood::bernoulli);

}  // namespace trajcast::mil
