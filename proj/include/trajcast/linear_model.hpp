#pragma once

#include <Eigen/Dense>

#include "trajcast/forecast_model.hpp"

namespace trajcast {

/// Multi-output least squares on flattened coordinates.
///
/// Fits W, b minimising ||Xc W - Yc||^2 + eps ||W||^2 on centered data by
/// solving (Xc^T Xc + eps I) W = Xc^T Yc; the intercept restores the means.
/// Directions of the Gram matrix whose eigenvalue is at roundoff level are
/// dropped, which gives the minimum-norm solution when eps is tiny and the
/// data are rank deficient.
class LinearModel final : public ForecastModel {
 public:
  explicit LinearModel(double ridge_epsilon = 1e-8);

  std::string kind() const override { return "linear"; }
  void fit_samples(std::span<const WindowSample> samples) override;
  std::vector<Point2> predict(std::span<const Point2> past) const override;
  std::size_t input_steps() const override { return static_cast<std::size_t>(weights_.rows() / 2); }
  std::size_t output_steps() const override { return static_cast<std::size_t>(weights_.cols() / 2); }
  nlohmann::json to_json() const override;
  std::unique_ptr<ForecastModel> clone_unfitted() const override;

  static std::unique_ptr<LinearModel> from_json(const nlohmann::json& j);

  double ridge_epsilon() const { return ridge_epsilon_; }
  /// 2*alpha x 2*horizon.
  const Eigen::MatrixXd& weights() const { return weights_; }
  const Eigen::VectorXd& intercept() const { return intercept_; }

 private:
  double ridge_epsilon_;
  Eigen::MatrixXd weights_;
  Eigen::VectorXd intercept_;
};

/// Solves (X^T X + eps I) W = X^T Y for already-centered X, Y. Throws
/// std::runtime_error when eps == 0 and the system is singular.
Eigen::MatrixXd solve_ridge_normal_equations(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double eps);

}  // namespace trajcast
