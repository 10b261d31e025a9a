#include "trajcast/linear_model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace trajcast {

Eigen::MatrixXd solve_ridge_normal_equations(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double eps) {
  if (eps < 0.0 || !std::isfinite(eps)) throw std::invalid_argument("ridge epsilon must be finite and >= 0");
  const Eigen::Index p = x.cols();
  Eigen::MatrixXd gram = x.transpose() * x;
  gram.diagonal().array() += eps;
  const Eigen::MatrixXd rhs = x.transpose() * y;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  if (eig.info() != Eigen::Success) throw std::runtime_error("normal equations: eigendecomposition failed");
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const double largest = lambda.cwiseAbs().maxCoeff();
  const double cutoff = largest * static_cast<double>(std::max<Eigen::Index>(p, 1)) *
                        std::numeric_limits<double>::epsilon();

  Eigen::VectorXd inv = Eigen::VectorXd::Zero(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    if (lambda[i] > cutoff && lambda[i] > 0.0) {
      inv[i] = 1.0 / lambda[i];
    } else if (eps == 0.0) {
      throw std::runtime_error("normal equations are singular; use ridge_epsilon > 0");
    }
  }
  const Eigen::MatrixXd& v = eig.eigenvectors();
  return v * inv.asDiagonal() * (v.transpose() * rhs);
}

LinearModel::LinearModel(double ridge_epsilon) : ridge_epsilon_(ridge_epsilon) {
  if (ridge_epsilon < 0.0 || !std::isfinite(ridge_epsilon)) {
    throw std::invalid_argument("ridge epsilon must be finite and >= 0");
  }
}

void LinearModel::fit_samples(std::span<const WindowSample> samples) {
  const auto [in, out] = sample_shape(samples);
  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(2 * in));
  Eigen::MatrixXd y(n, static_cast<Eigen::Index>(2 * out));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = samples[static_cast<std::size_t>(i)];
    const auto fx = flatten(s.past);
    const auto fy = flatten(s.target);
    x.row(i) = Eigen::Map<const Eigen::RowVectorXd>(fx.data(), static_cast<Eigen::Index>(fx.size()));
    y.row(i) = Eigen::Map<const Eigen::RowVectorXd>(fy.data(), static_cast<Eigen::Index>(fy.size()));
  }
  const Eigen::RowVectorXd x_mean = x.colwise().mean();
  const Eigen::RowVectorXd y_mean = y.colwise().mean();
  x.rowwise() -= x_mean;
  y.rowwise() -= y_mean;

  weights_ = solve_ridge_normal_equations(x, y, ridge_epsilon_);
  intercept_ = (y_mean - x_mean * weights_).transpose();
}

std::vector<Point2> LinearModel::predict(std::span<const Point2> past) const {
  if (weights_.size() == 0) throw std::logic_error("predict called before fit");
  if (past.size() != input_steps()) {
    throw std::invalid_argument("linear model expects " + std::to_string(input_steps()) + " past points, got " +
                                std::to_string(past.size()));
  }
  const auto fx = flatten(past);
  const Eigen::Map<const Eigen::RowVectorXd> row(fx.data(), static_cast<Eigen::Index>(fx.size()));
  const Eigen::VectorXd out = (row * weights_).transpose() + intercept_;
  return unflatten(std::span<const double>(out.data(), static_cast<std::size_t>(out.size())));
}

nlohmann::json LinearModel::to_json() const {
  std::vector<double> w;
  w.reserve(static_cast<std::size_t>(weights_.size()));
  for (Eigen::Index r = 0; r < weights_.rows(); ++r) {
    for (Eigen::Index c = 0; c < weights_.cols(); ++c) w.push_back(weights_(r, c));
  }
  return {{"kind", kind()},
          {"ridge_epsilon", ridge_epsilon_},
          {"rows", weights_.rows()},
          {"cols", weights_.cols()},
          {"weights", w},
          {"intercept", std::vector<double>(intercept_.data(), intercept_.data() + intercept_.size())}};
}

std::unique_ptr<LinearModel> LinearModel::from_json(const nlohmann::json& j) {
  auto m = std::make_unique<LinearModel>(j.value("ridge_epsilon", 1e-8));
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto w = j.at("weights").get<std::vector<double>>();
  const auto b = j.at("intercept").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(w.size()) != rows * cols || static_cast<Eigen::Index>(b.size()) != cols) {
    throw std::invalid_argument("linear model JSON: parameter sizes do not match rows/cols");
  }
  m->weights_.resize(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m->weights_(r, c) = w[static_cast<std::size_t>(r * cols + c)];
  }
  m->intercept_ = Eigen::Map<const Eigen::VectorXd>(b.data(), cols);
  return m;
}

std::unique_ptr<ForecastModel> LinearModel::clone_unfitted() const {
  return std::make_unique<LinearModel>(ridge_epsilon_);
}

}  // namespace trajcast
