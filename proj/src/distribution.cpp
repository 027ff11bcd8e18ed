#include "cogsense/distribution.hpp"

#include <algorithm>
#include <numeric>

namespace cogsense {

double percentile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) return kMissing;
  const double rank = q / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double percentile(std::span<const double> xs, double q) {
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  return percentile_sorted(sorted, q);
}

double median(std::span<const double> xs) { return percentile(xs, 50.0); }

double median_absolute_deviation(std::span<const double> xs) {
  if (xs.empty()) return kMissing;
  const double m = median(xs);
  std::vector<double> dev(xs.size());
  std::transform(xs.begin(), xs.end(), dev.begin(), [m](double x) { return std::abs(x - m); });
  return median(dev);
}

double mean_of(std::span<const double> xs) {
  if (xs.empty()) return kMissing;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double population_variance(std::span<const double> xs) {
  if (xs.empty()) return kMissing;
  const double m = mean_of(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return acc / static_cast<double>(xs.size());
}

DistributionStats summarize_distribution(std::span<const double> xs) {
  DistributionStats s;
  if (xs.empty()) return s;
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  s.mean = mean_of(sorted);
  s.p5 = percentile_sorted(sorted, 5.0);
  s.p25 = percentile_sorted(sorted, 25.0);
  s.p50 = percentile_sorted(sorted, 50.0);
  s.p75 = percentile_sorted(sorted, 75.0);
  s.p95 = percentile_sorted(sorted, 95.0);
  s.mad = median_absolute_deviation(sorted);
  return s;
}

}  // namespace cogsense
