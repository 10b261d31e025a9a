#include "trajcast/mil.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace trajcast::mil {

double WeakClassifier::operator()(std::span<const double> x) const {
  if (feature >= x.size()) {
    throw std::invalid_argument("stump reads feature " + std::to_string(feature) + " of a " +
                                std::to_string(x.size()) + "-dimensional instance");
  }
  return polarity * (x[feature] - threshold) > 0 ? 1.0 : -1.0;
}

double StrongClassifier::score(std::span<const double> x) const {
  double s = 0.0;
  for (const auto& t : terms) s += t.lambda * t.h(x);
  return s;
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double instance_probability(const StrongClassifier& H, std::span<const double> x) { return sigmoid(H.score(x)); }

double noisy_or(std::span<const double> instance_probabilities) {
  if (instance_probabilities.empty()) throw std::invalid_argument("noisy-OR of an empty bag");
  double miss = 1.0, top = 0.0;
  for (double p : instance_probabilities) {
    miss *= 1.0 - p;
    top = std::max(top, p);
  }
  // 1 - (1 - p) can round below p.
  return std::max(1.0 - miss, top);
}

double bag_probability(const StrongClassifier& H, const Bag& bag) {
  std::vector<double> p;
  p.reserve(bag.instances.size());
  for (const auto& x : bag.instances) p.push_back(instance_probability(H, x));
  return noisy_or(p);
}

namespace {

double bag_term(double p, int label, Likelihood form) {
  p = std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp);
  if (label == 1) return std::log(p);
  return form == Likelihood::bernoulli ? std::log(1.0 - p) : 0.0;
}

void check_label(const Bag& bag) {
  if (bag.label != 0 && bag.label != 1) throw std::invalid_argument("bag labels must be 0 or 1");
}

}  // namespace

double bag_log_likelihood(const StrongClassifier& H, std::span<const Bag> bags, Likelihood form) {
  double ll = 0.0;
  for (const auto& bag : bags) {
    check_label(bag);
    ll += bag_term(bag_probability(H, bag), bag.label, form);
  }
  return ll;
}

std::vector<double> lambda_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 10; ++i) grid.push_back(i / 10.0);
  return grid;
}

StrongClassifier greedy_select(std::span<const WeakClassifier> candidates, std::span<const Bag> bags, std::size_t K,
                               Likelihood form, SelectionTrace* trace) {
  StrongClassifier H;
  if (K == 0) return H;
  if (candidates.empty()) throw std::invalid_argument("greedy_select needs at least one candidate");
  for (const auto& bag : bags) {
    check_label(bag);
    if (bag.instances.empty()) throw std::invalid_argument("bags must hold at least one instance");
  }

  // Stump outputs are fixed, so evaluate every candidate on every instance once.
  std::vector<std::vector<std::vector<double>>> h(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    h[c].resize(bags.size());
    for (std::size_t b = 0; b < bags.size(); ++b) {
      for (const auto& x : bags[b].instances) h[c][b].push_back(candidates[c](x));
    }
  }
  std::vector<std::vector<double>> score(bags.size());
  for (std::size_t b = 0; b < bags.size(); ++b) score[b].assign(bags[b].instances.size(), 0.0);

  const auto grid = lambda_grid();
  std::vector<double> p;
  for (std::size_t k = 0; k < K; ++k) {
    double best_ll = -INFINITY;
    std::size_t best_c = 0;
    double best_lambda = grid.front();
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      for (double lambda : grid) {
        double ll = 0.0;
        for (std::size_t b = 0; b < bags.size(); ++b) {
          p.clear();
          for (std::size_t i = 0; i < score[b].size(); ++i) p.push_back(sigmoid(score[b][i] + lambda * h[c][b][i]));
          ll += bag_term(noisy_or(p), bags[b].label, form);
        }
        if (ll > best_ll) {
          best_ll = ll;
          best_c = c;
          best_lambda = lambda;
        }
      }
    }
    H.terms.push_back({best_lambda, candidates[best_c]});
    for (std::size_t b = 0; b < bags.size(); ++b) {
      for (std::size_t i = 0; i < score[b].size(); ++i) score[b][i] += best_lambda * h[best_c][b][i];
    }
    if (trace) trace->log_likelihood.push_back(best_ll);
  }
  return H;
}

std::vector<WeakClassifier> make_stump_candidates(std::span<const Bag> bags) {
  std::size_t dim = 0;
  bool first = true;
  for (const auto& bag : bags) {
    for (const auto& x : bag.instances) {
      if (first) {
        dim = x.size();
        first = false;
      } else if (x.size() != dim) {
        throw std::invalid_argument("instances have inconsistent feature dimensions");
      }
    }
  }
  std::vector<WeakClassifier> out;
  for (std::size_t f = 0; f < dim; ++f) {
    std::vector<double> values;
    for (const auto& bag : bags) {
      for (const auto& x : bag.instances) values.push_back(x[f]);
    }
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
      const double mid = values[i] + (values[i + 1] - values[i]) / 2.0;
      out.push_back({f, mid, 1});
      out.push_back({f, mid, -1});
    }
  }
  return out;
}

namespace {

Instance parse_instance(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("instance must be a non-empty list of numbers");
  Instance x;
  for (const auto& v : j) {
    if (!v.is_number()) throw std::invalid_argument("instance features must be numbers");
    x.push_back(v.get<double>());
    if (!std::isfinite(x.back())) throw std::invalid_argument("instance features must be finite");
  }
  return x;
}

Bag parse_bag(const nlohmann::json& j, int label) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("bag must be a non-empty list");
  Bag bag;
  bag.label = label;
  if (j.front().is_number()) {
    bag.instances.push_back(parse_instance(j));
  } else {
    for (const auto& x : j) bag.instances.push_back(parse_instance(x));
  }
  return bag;
}

}  // namespace

std::vector<FrameBags> read_bag_stream(std::istream& in) {
  std::vector<FrameBags> frames;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      FrameBags f;
      f.positive = parse_bag(j.at("positive"), 1);
      for (const auto& n : j.at("negatives")) f.negatives.push_back(parse_bag(n, 0));
      frames.push_back(std::move(f));
    } catch (const std::exception& e) {
      throw std::invalid_argument("bag stream line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return frames;
}

StrongClassifier online_update(const Bag& positive, std::span<const Bag> negatives, std::span<const Bag> history,
                               std::span<const WeakClassifier> candidates, std::size_t K, Likelihood form) {
  if (negatives.empty()) throw std::invalid_argument("online update needs at least one negative bag");
  std::vector<Bag> bags(history.begin(), history.end());
  bags.push_back(positive);
  bags.back().label = 1;
  for (const auto& n : negatives) {
    bags.push_back(n);
    bags.back().label = 0;
  }
  return greedy_select(candidates, bags, K, form);
}

OnlineMilTracker::OnlineMilTracker(std::size_t K, std::size_t history_frames, Likelihood form)
    : K_(K), history_frames_(history_frames), form_(form) {}

std::vector<Bag> OnlineMilTracker::history_bags() const {
  std::vector<Bag> bags;
  for (const auto& f : history_) {
    bags.push_back(f.positive);
    bags.insert(bags.end(), f.negatives.begin(), f.negatives.end());
  }
  return bags;
}

const StrongClassifier& OnlineMilTracker::update(const Bag& positive, std::span<const Bag> negatives,
                                                 std::span<const WeakClassifier> candidates) {
  const auto past = history_bags();
  classifier_ = online_update(positive, negatives, past, candidates, K_, form_);
  FrameBags frame{positive, {negatives.begin(), negatives.end()}};
  frame.positive.label = 1;
  for (auto& n : frame.negatives) n.label = 0;
  history_.push_back(std::move(frame));
  while (history_.size() > history_frames_) history_.pop_front();
  return classifier_;
}

}  // namespace trajcast::mil
