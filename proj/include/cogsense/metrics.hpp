#pragma once

#include <span>
#include <vector>

namespace cogsense {

/// P(score+ > score-) + P(tie) / 2, via mid-ranks. Throws unless both classes occur.
double auc(std::span<const double> scores, std::span<const int> labels);

/// Average precision: sum over distinct thresholds of (recall step) x precision,
/// tied scores forming one threshold. Throws without positives.
double auprc(std::span<const double> scores, std::span<const int> labels);

struct TTestResult {
  double t = 0.0;
  double p = 0.0;  // one-sided, upper tail
  double df = 0.0;
};

/// H1: mean(xs - ys) > 0.
TTestResult paired_t_test_one_sided(std::span<const double> xs, std::span<const double> ys);

/// H1: mean(xs) > mu0.
TTestResult one_sample_t_test_one_sided(std::span<const double> xs, double mu0);

/// Regularized incomplete beta I_x(a, b) (continued fraction).
double incomplete_beta(double a, double b, double x);

/// CDF of Student's t with `df` degrees of freedom.
double student_t_cdf(double t, double df);

double sample_mean(std::span<const double> xs);
/// Sample standard deviation (n - 1); 0 for fewer than two values.
double sample_sd(std::span<const double> xs);

}  // namespace cogsense
