#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace oracle {

Eigen::MatrixXd ridge_via_svd(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double eps) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double cutoff = s.size() ? s(0) * std::max(x.rows(), x.cols()) * std::numeric_limits<double>::epsilon() : 0;
  Eigen::VectorXd gain = Eigen::VectorXd::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff) gain(i) = s(i) / (s(i) * s(i) + eps);
  }
  return svd.matrixV() * gain.asDiagonal() * svd.matrixU().transpose() * y;
}

Eigen::MatrixXd features(std::span<const trajcast::WindowSample> samples) {
  const auto cols = static_cast<Eigen::Index>(samples.front().past.size() * 2);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(samples.size()), cols);
  for (std::size_t r = 0; r < samples.size(); ++r) {
    for (std::size_t i = 0; i < samples[r].past.size(); ++i) {
      x(r, 2 * i) = samples[r].past[i].x;
      x(r, 2 * i + 1) = samples[r].past[i].y;
    }
  }
  return x;
}

Eigen::MatrixXd targets(std::span<const trajcast::WindowSample> samples) {
  const auto cols = static_cast<Eigen::Index>(samples.front().target.size() * 2);
  Eigen::MatrixXd y(static_cast<Eigen::Index>(samples.size()), cols);
  for (std::size_t r = 0; r < samples.size(); ++r) {
    for (std::size_t i = 0; i < samples[r].target.size(); ++i) {
      y(r, 2 * i) = samples[r].target[i].x;
      y(r, 2 * i + 1) = samples[r].target[i].y;
    }
  }
  return y;
}

namespace {

double sse_of(const std::vector<std::vector<double>>& y, const std::vector<std::size_t>& rows) {
  if (rows.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < y.front().size(); ++k) {
    double mean = 0.0;
    for (auto r : rows) mean += y[r][k];
    mean /= static_cast<double>(rows.size());
    for (auto r : rows) total += (y[r][k] - mean) * (y[r][k] - mean);
  }
  return total;
}

}  // namespace

double split_sse(const std::vector<std::vector<double>>& x, const std::vector<std::vector<double>>& y,
                 std::size_t feature, double threshold) {
  std::vector<std::size_t> left, right;
  for (std::size_t r = 0; r < x.size(); ++r) (x[r][feature] <= threshold ? left : right).push_back(r);
  return sse_of(y, left) + sse_of(y, right);
}

Split best_split(const std::vector<std::vector<double>>& x, const std::vector<std::vector<double>>& y) {
  Split best;
  best.sse = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < x.front().size(); ++f) {
    std::vector<double> values;
    for (const auto& row : x) values.push_back(row[f]);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
      const double t = (values[i] + values[i + 1]) / 2.0;
      std::vector<std::size_t> left, right;
      for (std::size_t r = 0; r < x.size(); ++r) (x[r][f] <= t ? left : right).push_back(r);
      const double sse = sse_of(y, left) + sse_of(y, right);
      if (sse < best.sse) best = {true, f, t, sse};
    }
  }
  return best;
}

std::vector<double> finite_difference(std::vector<double> params,
                                      const std::function<double(std::span<const double>)>& loss, double step) {
  std::vector<double> grad(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double keep = params[i];
    params[i] = keep + step;
    const double up = loss(params);
    params[i] = keep - step;
    const double down = loss(params);
    params[i] = keep;
    grad[i] = (up - down) / (2.0 * step);
  }
  return grad;
}

double network_loss(const trajcast::cnn::Network& net, std::span<const double> params,
                    const trajcast::cnn::Tensor& input, std::span<const double> target) {
  auto copy = net;
  std::copy(params.begin(), params.end(), copy.parameters().begin());
  const auto out = copy.forward(input);
  double total = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) total += (out[i] - target[i]) * (out[i] - target[i]);
  return total / static_cast<double>(out.size());
}

double bag_probability(const trajcast::mil::StrongClassifier& H, const trajcast::mil::Bag& bag) {
  double none = 1.0;
  for (const auto& x : bag.instances) {
    double score = 0.0;
    for (const auto& t : H.terms) {
      const double v = x[t.h.feature];
      const bool positive = t.h.polarity > 0 ? v > t.h.threshold : v < t.h.threshold;
      score += t.lambda * (positive ? 1.0 : -1.0);
    }
    none *= 1.0 - 1.0 / (1.0 + std::exp(-score));
  }
  return 1.0 - none;
}

double log_likelihood(const trajcast::mil::StrongClassifier& H, std::span<const trajcast::mil::Bag> bags) {
  double total = 0.0;
  for (const auto& bag : bags) {
    double p = oracle::bag_probability(H, bag);
    p = std::min(std::max(p, 1e-12), 1.0 - 1e-12);
    total += bag.label == 1 ? std::log(p) : std::log1p(-p);
  }
  return total;
}

double kl(std::span<const double> p, std::span<const double> q) {
  double cross = 0.0, entropy = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    entropy += p[i] * std::log(p[i]);
    cross += p[i] * std::log(q[i]);
  }
  return entropy - cross;
}

std::vector<double> per_segment_mse(const std::vector<std::vector<trajcast::Point2>>& pred,
                                    const std::vector<std::vector<trajcast::Point2>>& truth, std::size_t segment) {
  const std::size_t horizon = truth.front().size();
  std::vector<double> out;
  for (std::size_t start = 0; start < horizon; start += segment) {
    double total = 0.0;
    std::size_t n = 0;
    for (std::size_t s = 0; s < truth.size(); ++s) {
      for (std::size_t h = start; h < start + segment; ++h) {
        const double dx = pred[s][h].x - truth[s][h].x;
        const double dy = pred[s][h].y - truth[s][h].y;
        total += dx * dx + dy * dy;
        n += 2;
      }
    }
    out.push_back(total / static_cast<double>(n));
  }
  return out;
}

double auc(std::span<const double> positive, std::span<const double> negative) {
  double wins = 0.0;
  for (double p : positive) {
    for (double n : negative) wins += p > n ? 1.0 : (p == n ? 0.5 : 0.0);
  }
  return wins / static_cast<double>(positive.size() * negative.size());
}

}  // namespace oracle
