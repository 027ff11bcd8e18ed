#include "cogsense/logistic.hpp"

#include <sstream>

namespace cogsense {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

double LogisticModel::predict(const Eigen::RowVectorXd& x) const {
  return sigmoid(x.dot(coefficients) + intercept);
}

std::vector<double> LogisticModel::predict(const Matrix& x) const {
  std::vector<double> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) out[static_cast<std::size_t>(i)] = predict(Eigen::RowVectorXd(x.row(i)));
  return out;
}

LogisticModel fit_logistic(const Matrix& x, std::span<const int> labels, const LogisticConfig& config) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  if (n == 0 || static_cast<std::size_t>(n) != labels.size()) {
    throw Error("logistic regression needs one label per row");
  }
  // Augmented design [1, x]; the intercept is not penalized.
  Matrix design(n, d + 1);
  design.col(0).setOnes();
  design.rightCols(d) = x;
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = labels[static_cast<std::size_t>(i)];
  Vector c = Vector::Ones(n);
  const double positives = y.sum();
  if (config.balanced && positives > 0.0 && positives < static_cast<double>(n)) {
    for (Eigen::Index i = 0; i < n; ++i) {
      c[i] = static_cast<double>(n) / (2.0 * (y[i] > 0.5 ? positives : static_cast<double>(n) - positives));
    }
  }

  Vector beta = Vector::Zero(d + 1);
  Vector penalty = Vector::Constant(d + 1, config.l2);
  penalty[0] = 0.0;
  LogisticModel model;
  double grad_norm = 0.0;
  bool done = false;
  for (std::size_t it = 0; it <= config.max_iterations; ++it) {
    const Vector z = design * beta;
    Vector p(n), w(n);
    bool separated = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      p[i] = sigmoid(z[i]);
      w[i] = c[i] * std::max(p[i] * (1.0 - p[i]), 1e-12);
      if ((y[i] > 0.5) != (z[i] > 0.0)) separated = false;
    }
    const Vector grad = design.transpose() * c.cwiseProduct(p - y) + penalty.cwiseProduct(beta);
    grad_norm = grad.norm();
    model.iterations = it;
    if (grad_norm < config.tolerance) {
      done = true;
      break;
    }
    if (it > 0 && separated && config.stop_on_separation) {
      model.separated = true;
      done = true;
      break;
    }
    if (it == config.max_iterations) break;
    Eigen::MatrixXd hessian = design.transpose() * w.asDiagonal() * design;
    hessian.diagonal() += penalty;
    hessian.diagonal().array() += 1e-10;
    beta -= hessian.ldlt().solve(grad);
    if (!beta.allFinite()) throw Error("logistic regression diverged");
  }
  if (!done) {
    std::ostringstream msg;
    msg << "logistic regression did not converge in " << config.max_iterations
        << " iterations (gradient norm " << grad_norm << ")";
    throw Error(msg.str());
  }
  model.intercept = beta[0];
  model.coefficients = beta.tail(d);
  return model;
}

}  // namespace cogsense
