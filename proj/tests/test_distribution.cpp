#include <doctest.h>

#include <algorithm>
#include <random>

#include "cogsense/distribution.hpp"

using namespace cogsense;

namespace {

// Percentile by explicit interpolation between the two bracketing order
// statistics, found by scanning rather than indexing.
double percentile_oracle(std::vector<double> xs, double q) {
  std::sort(xs.begin(), xs.end());
  const double rank = q / 100.0 * static_cast<double>(xs.size() - 1);
  double lo = xs.front(), hi = xs.front(), frac = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (static_cast<double>(i) <= rank) {
      lo = xs[i];
      hi = i + 1 < xs.size() ? xs[i + 1] : xs[i];
      frac = rank - static_cast<double>(i);
    }
  }
  return lo + frac * (hi - lo);
}

}  // namespace

TEST_CASE("distribution summary of a symmetric sequence") {
  const std::vector<double> xs{1, 2, 3, 4, 5};
  const auto s = summarize_distribution(xs);
  CHECK(s.mean == 3);
  CHECK(s.p50 == 3);
  CHECK(s.mad == 1);
  CHECK(s.p25 == 2);
  CHECK(s.p75 == 4);
}

TEST_CASE("singleton and empty inputs") {
  const auto s = summarize_distribution(std::vector<double>{7});
  for (double v : {s.mean, s.p5, s.p25, s.p50, s.p75, s.p95}) CHECK(v == 7);
  CHECK(s.mad == 0);
  const auto e = summarize_distribution(std::vector<double>{});
  for (double v : e.values()) CHECK(is_missing(v));
}

TEST_CASE("linear percentile interpolation") {
  std::vector<double> xs(100);
  std::iota(xs.begin(), xs.end(), 1.0);
  CHECK(percentile(xs, 5) == doctest::Approx(5.95));
  CHECK(summarize_distribution(xs).p5 == doctest::Approx(5.95));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-50, 50);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> v(1 + rng() % 40);
    for (auto& x : v) x = u(rng);
    for (double q : {0.0, 5.0, 25.0, 50.0, 75.0, 95.0, 100.0}) {
      CHECK(percentile(v, q) == doctest::Approx(percentile_oracle(v, q)).epsilon(1e-12));
    }
  }
}

TEST_CASE("median absolute deviation") {
  CHECK(median_absolute_deviation(std::vector<double>{1, 1, 2, 2, 4, 6, 9}) == 1);
  CHECK(median(std::vector<double>{4, 1, 3, 2}) == 2.5);
  CHECK(population_variance(std::vector<double>{0, 2}) == 1);
  CHECK(mean_of(std::vector<double>{1, 2, 6}) == 3);
}
