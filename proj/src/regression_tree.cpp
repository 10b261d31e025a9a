#include "trajcast/regression_tree.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace trajcast {

void RegressionTree::fit_samples(std::span<const WindowSample> samples) {
  const auto [in, out] = sample_shape(samples);
  input_steps_ = in;
  output_steps_ = out;
  std::vector<std::vector<double>> x, y;
  x.reserve(samples.size());
  y.reserve(samples.size());
  for (const auto& s : samples) {
    x.push_back(flatten(s.past));
    y.push_back(flatten(s.target));
  }
  nodes_.clear();
  std::vector<std::size_t> rows(samples.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  build(rows, x, y);
}

std::size_t RegressionTree::build(std::vector<std::size_t>& rows, const std::vector<std::vector<double>>& x,
                                  const std::vector<std::vector<double>>& y) {
  const std::size_t id = nodes_.size();
  nodes_.emplace_back();
  const std::size_t n = rows.size();
  const std::size_t q = y.front().size();
  const std::size_t p = x.front().size();

  std::vector<double> mean(q, 0.0);
  for (auto r : rows) {
    for (std::size_t d = 0; d < q; ++d) mean[d] += y[r][d];
  }
  for (auto& m : mean) m /= static_cast<double>(n);

  const bool pure = std::all_of(rows.begin(), rows.end(), [&](std::size_t r) { return y[r] == y[rows.front()]; });
  auto make_leaf = [&] {
    Node& leaf = nodes_[id];
    leaf.samples = n;
    leaf.value = pure ? y[rows.front()] : mean;
    return id;
  };
  if (n <= max_leaf_samples_ || pure) return make_leaf();

  // Centered targets keep the gain computation free of large cancellations.
  std::vector<std::vector<double>> centered(n, std::vector<double>(q));
  std::vector<double> total(q, 0.0);
  double parent_sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < q; ++d) {
      const double c = y[rows[i]][d] - mean[d];
      centered[i][d] = c;
      total[d] += c;
      parent_sse += c * c;
    }
  }

  double best_gain = 0.0;
  std::int64_t best_feature = -1;
  double best_threshold = 0.0;
  std::vector<std::size_t> order(n);
  std::vector<double> left_sum(q);
  for (std::size_t f = 0; f < p; ++f) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return x[rows[a]][f] < x[rows[b]][f]; });
    std::fill(left_sum.begin(), left_sum.end(), 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t d = 0; d < q; ++d) left_sum[d] += centered[order[i]][d];
      const double a = x[rows[order[i]]][f];
      const double b = x[rows[order[i + 1]]][f];
      if (!(a < b)) continue;
      const auto nl = static_cast<double>(i + 1);
      const auto nr = static_cast<double>(n - i - 1);
      double sl = 0.0, sr = 0.0;
      for (std::size_t d = 0; d < q; ++d) {
        sl += left_sum[d] * left_sum[d];
        const double r = total[d] - left_sum[d];
        sr += r * r;
      }
      const double gain = sl / nl + sr / nr;
      if (gain > best_gain) {
        best_gain = gain;
        best_feature = static_cast<std::int64_t>(f);
        double mid = a + (b - a) / 2.0;
        if (!(mid < b)) mid = a;
        best_threshold = mid;
      }
    }
  }

  if (best_feature < 0 || best_gain <= 1e-12 * parent_sse) return make_leaf();

  std::vector<std::size_t> left_rows, right_rows;
  for (auto r : rows) {
    (x[r][static_cast<std::size_t>(best_feature)] <= best_threshold ? left_rows : right_rows).push_back(r);
  }
  nodes_[id].feature = best_feature;
  nodes_[id].threshold = best_threshold;
  nodes_[id].samples = n;
  const auto left = build(left_rows, x, y);
  const auto right = build(right_rows, x, y);
  nodes_[id].left = static_cast<std::int64_t>(left);
  nodes_[id].right = static_cast<std::int64_t>(right);
  return id;
}

std::size_t RegressionTree::leaf_index(std::span<const double> features) const {
  if (nodes_.empty()) throw std::logic_error("predict called before fit");
  std::size_t i = 0;
  while (nodes_[i].feature >= 0) {
    const auto& node = nodes_[i];
    i = static_cast<std::size_t>(features[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left
                                                                                                     : node.right);
  }
  return i;
}

std::vector<Point2> RegressionTree::predict(std::span<const Point2> past) const {
  if (past.size() != input_steps_) {
    throw std::invalid_argument("tree expects " + std::to_string(input_steps_) + " past points, got " +
                                std::to_string(past.size()));
  }
  const auto features = flatten(past);
  return unflatten(nodes_[leaf_index(features)].value);
}

nlohmann::json RegressionTree::to_json() const {
  auto nodes = nlohmann::json::array();
  for (const auto& n : nodes_) {
    nlohmann::json j{{"feature", n.feature}, {"samples", n.samples}};
    if (n.feature >= 0) {
      j["threshold"] = n.threshold;
      j["left"] = n.left;
      j["right"] = n.right;
    } else {
      j["value"] = n.value;
    }
    nodes.push_back(std::move(j));
  }
  return {{"kind", kind()},
          {"max_leaf_samples", max_leaf_samples_},
          {"input_steps", input_steps_},
          {"output_steps", output_steps_},
          {"nodes", std::move(nodes)}};
}

std::unique_ptr<RegressionTree> RegressionTree::from_json(const nlohmann::json& j) {
  auto t = std::make_unique<RegressionTree>(j.value("max_leaf_samples", std::size_t{2}));
  t->input_steps_ = j.at("input_steps").get<std::size_t>();
  t->output_steps_ = j.at("output_steps").get<std::size_t>();
  for (const auto& jn : j.at("nodes")) {
    Node n;
    n.feature = jn.at("feature").get<std::int64_t>();
    n.samples = jn.value("samples", std::size_t{0});
    if (n.feature >= 0) {
      n.threshold = jn.at("threshold").get<double>();
      n.left = jn.at("left").get<std::int64_t>();
      n.right = jn.at("right").get<std::int64_t>();
    } else {
      n.value = jn.at("value").get<std::vector<double>>();
    }
    t->nodes_.push_back(std::move(n));
  }
  const auto count = static_cast<std::int64_t>(t->nodes_.size());
  for (const auto& n : t->nodes_) {
    if (n.feature >= 0 && (n.left <= 0 || n.left >= count || n.right <= 0 || n.right >= count)) {
      throw std::invalid_argument("tree JSON: child index out of range");
    }
    if (n.feature < 0 && n.value.size() != 2 * t->output_steps_) {
      throw std::invalid_argument("tree JSON: leaf value has the wrong size");
    }
  }
  return t;
}

std::unique_ptr<ForecastModel> RegressionTree::clone_unfitted() const {
  return std::make_unique<RegressionTree>(max_leaf_samples_);
}

}  // namespace trajcast
