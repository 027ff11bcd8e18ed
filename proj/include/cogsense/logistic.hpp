#pragma once

// Deterministic L2-regularized logistic regression (Newton's method), used by
// the demographic and window-summary baselines.

#include <span>

#include "cogsense/sequence.hpp"

namespace cogsense {

struct LogisticConfig {
  double l2 = 1e-3;
  std::size_t max_iterations = 100;
  double tolerance = 1e-8;  // on the gradient norm
  bool stop_on_separation = true;
  /// Weights each class by n / (2 n_y) so a featureless fit predicts 0.5
  /// regardless of the training fold's prevalence.
  bool balanced = true;
};

struct LogisticModel {
  Vector coefficients;  // one per column
  double intercept = 0.0;
  std::size_t iterations = 0;
  bool separated = false;

  double predict(const Eigen::RowVectorXd& x) const;
  std::vector<double> predict(const Matrix& x) const;
};

/// Fits on rows of `x` with labels in {0, 1}. Throws with the final gradient
/// norm when the iteration budget runs out.
LogisticModel fit_logistic(const Matrix& x, std::span<const int> labels,
                           const LogisticConfig& config = {});

}  // namespace cogsense
