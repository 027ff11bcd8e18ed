#pragma once

#include <span>
#include <vector>

#include "cogsense/timeline.hpp"

namespace cogsense {

/// Robust summary of one day's per-event measurements. Fields are NaN when
/// the input is empty.
struct DistributionStats {
  double mean = kMissing;
  double p5 = kMissing;
  double p25 = kMissing;
  double p50 = kMissing;
  double p75 = kMissing;
  double p95 = kMissing;
  double mad = kMissing;

  static constexpr std::size_t kSize = 7;
  std::array<double, kSize> values() const { return {mean, p5, p25, p50, p75, p95, mad}; }
};

inline constexpr std::array<std::string_view, DistributionStats::kSize> kDistributionStatNames{
    "mean", "p5", "p25", "p50", "p75", "p95", "mad"};

/// Linear interpolation between order statistics: rank = q/100 * (n - 1).
/// `sorted` must be ascending and nonempty.
double percentile_sorted(std::span<const double> sorted, double q);

/// Copies, sorts, interpolates. Empty input yields NaN.
double percentile(std::span<const double> xs, double q);

double median(std::span<const double> xs);

/// median(|x - median(x)|)
double median_absolute_deviation(std::span<const double> xs);

DistributionStats summarize_distribution(std::span<const double> xs);

double mean_of(std::span<const double> xs);

/// Population variance (divides by n).
double population_variance(std::span<const double> xs);

}  // namespace cogsense
