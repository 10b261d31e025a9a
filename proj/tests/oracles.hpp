#pragma once

// Independent reference computations used to check the library.

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

#include "trajcast/cnn/network.hpp"
#include "trajcast/forecast_model.hpp"
#include "trajcast/mil.hpp"
#include "trajcast/track_quality.hpp"

namespace oracle {

/// Ridge solution through the SVD of X: W = V diag(s / (s^2 + eps)) U^T Y,
/// dropping singular values below the numerical rank threshold.
Eigen::MatrixXd ridge_via_svd(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double eps);

/// Design matrices of flattened pasts / targets.
Eigen::MatrixXd features(std::span<const trajcast::WindowSample> samples);
Eigen::MatrixXd targets(std::span<const trajcast::WindowSample> samples);

struct Split {
  bool found = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  double sse = 0.0;
};

/// Exhaustive search for the split with the smallest summed squared error of
/// the children, computed directly from the member rows.
Split best_split(const std::vector<std::vector<double>>& x, const std::vector<std::vector<double>>& y);

double split_sse(const std::vector<std::vector<double>>& x, const std::vector<std::vector<double>>& y,
                 std::size_t feature, double threshold);

/// Central differences of `loss` around `params`.
std::vector<double> finite_difference(std::vector<double> params,
                                      const std::function<double(std::span<const double>)>& loss, double step);

/// Loss of a network whose parameters are replaced by `params`.
double network_loss(const trajcast::cnn::Network& net, std::span<const double> params,
                    const trajcast::cnn::Tensor& input, std::span<const double> target);

double bag_probability(const trajcast::mil::StrongClassifier& H, const trajcast::mil::Bag& bag);
double log_likelihood(const trajcast::mil::StrongClassifier& H, std::span<const trajcast::mil::Bag> bags);

double kl(std::span<const double> p, std::span<const double> q);

std::vector<double> per_segment_mse(const std::vector<std::vector<trajcast::Point2>>& pred,
                                    const std::vector<std::vector<trajcast::Point2>>& truth, std::size_t segment);

/// Mann-Whitney AUC of positive versus negative scores (ties count half).
double auc(std::span<const double> positive, std::span<const double> negative);

}  // namespace oracle
