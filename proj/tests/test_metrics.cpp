#include <doctest.h>

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <random>
#include <set>

#include "cogsense/metrics.hpp"

using namespace cogsense;

namespace {

double auc_pairs(const std::vector<double>& s, const std::vector<int>& y) {
  double credit = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[i] != 1 || y[j] != 0) continue;
      pairs += 1.0;
      credit += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
    }
  }
  return credit / pairs;
}

/// Enumerates every distinct score as a threshold, highest first.
double ap_thresholds(const std::vector<double>& s, const std::vector<int>& y) {
  std::set<double, std::greater<>> thresholds(s.begin(), s.end());
  const double positives = static_cast<double>(std::count(y.begin(), y.end(), 1));
  double ap = 0.0, prev_recall = 0.0;
  for (double th : thresholds) {
    double tp = 0, fp = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] >= th) (y[i] ? tp : fp) += 1;
    }
    const double recall = tp / positives;
    ap += (recall - prev_recall) * (tp / (tp + fp));
    prev_recall = recall;
  }
  return ap;
}

}  // namespace

TEST_CASE("auc anchors") {
  const std::vector<int> y{0, 0, 1, 1};
  CHECK(auc(std::vector<double>{0.1, 0.2, 0.8, 0.9}, y) == 1.0);
  CHECK(auc(std::vector<double>{0.9, 0.8, 0.2, 0.1}, y) == 0.0);
  CHECK(auc(std::vector<double>{0.5, 0.5, 0.5, 0.5}, y) == 0.5);
  CHECK_THROWS_AS(auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}), std::exception);
  CHECK_THROWS_AS(auc(std::vector<double>{0.1}, std::vector<int>{1, 0}), std::exception);
}

TEST_CASE("auprc anchors") {
  const std::vector<int> y{0, 0, 1, 1, 0, 0};
  CHECK(auprc(std::vector<double>{0.1, 0.2, 0.8, 0.9, 0.3, 0.1}, y) == 1.0);
  const std::vector<int> y3{1, 0, 0, 1, 0, 0, 1, 0, 0};
  CHECK(auprc(std::vector<double>(9, 0.4), y3) == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(auprc(std::vector<double>{0.1, 0.2}, std::vector<int>{0, 0}), std::exception);
}

TEST_CASE("metrics match brute-force oracles on small sets") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 2 + rng() % 11;
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng() % 6) / 5.0;  // coarse grid forces ties
      y[i] = static_cast<int>(rng() % 2);
    }
    y[0] = 1;
    y[1] = 0;
    CHECK(auc(s, y) == doctest::Approx(auc_pairs(s, y)).epsilon(1e-12));
    CHECK(auprc(s, y) == doctest::Approx(ap_thresholds(s, y)).epsilon(1e-12));

    // Strictly monotone transforms keep the ranking.
    std::vector<double> t(n);
    std::transform(s.begin(), s.end(), t.begin(), [](double v) { return std::exp(3 * v) - 7; });
    CHECK(auc(t, y) == doctest::Approx(auc(s, y)).epsilon(1e-12));
    for (double v : {auc(s, y), auprc(s, y)}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("t tests") {
  const std::vector<double> d{1, 2, 3}, zero{0, 0, 0};
  const auto paired = paired_t_test_one_sided(d, zero);
  CHECK(paired.t == doctest::Approx(2 * std::sqrt(3.0)));
  CHECK(paired.df == 2);
  const auto one = one_sample_t_test_one_sided(d, 0.0);
  CHECK(one.t == doctest::Approx(2 * std::sqrt(3.0)));
  CHECK(one.p == doctest::Approx(paired.p));

  const auto centered = one_sample_t_test_one_sided(d, 2.0);
  CHECK(centered.t == 0);
  CHECK(centered.p == doctest::Approx(0.5));

  CHECK_THROWS_AS(paired_t_test_one_sided(d, d), std::exception);
  CHECK_THROWS_AS(paired_t_test_one_sided(std::vector<double>{2, 3, 4, 5}, std::vector<double>{1, 2, 3, 4}),
                  std::exception);
  CHECK_THROWS_AS(one_sample_t_test_one_sided(std::vector<double>{1.0}, 0.0), std::exception);
  CHECK_THROWS_AS(paired_t_test_one_sided(d, std::vector<double>{1, 2}), std::exception);

  double previous = 2.0;
  for (double shift : {-1.0, 0.0, 0.5, 1.0, 2.0}) {
    std::vector<double> xs = d;
    for (auto& v : xs) v += shift;
    const auto r = one_sample_t_test_one_sided(xs, 2.0);
    CHECK(r.p < previous);
    previous = r.p;
  }
}

TEST_CASE("t distribution against boost") {
  for (double df : {1.0, 2.0, 4.5, 9.0, 30.0, 200.0}) {
    boost::math::students_t dist(df);
    for (double t : {-12.0, -3.1, -1.0, -0.2, 0.0, 0.4, 1.7, 3.464, 8.0, 40.0}) {
      CHECK(student_t_cdf(t, df) == doctest::Approx(boost::math::cdf(dist, t)).epsilon(1e-10));
    }
  }
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0.3, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> xs(3 + trial % 10);
    for (auto& x : xs) x = g(rng);
    const auto r = one_sample_t_test_one_sided(xs, 0.0);
    boost::math::students_t dist(static_cast<double>(xs.size() - 1));
    CHECK(r.p == doctest::Approx(boost::math::cdf(boost::math::complement(dist, r.t))).epsilon(1e-10));
  }
}

TEST_CASE("incomplete beta edges") {
  CHECK(incomplete_beta(2, 3, 0.0) == 0.0);
  CHECK(incomplete_beta(2, 3, 1.0) == 1.0);
  CHECK(incomplete_beta(1, 1, 0.3) == doctest::Approx(0.3));
  CHECK(incomplete_beta(2, 2, 0.5) == doctest::Approx(0.5));
}

TEST_CASE("sample statistics") {
  CHECK(sample_mean(std::vector<double>{1, 2, 3, 6}) == 3);
  CHECK(sample_sd(std::vector<double>{2, 4, 4, 4, 5, 5, 7, 9}) == doctest::Approx(std::sqrt(32.0 / 7)));
  CHECK(sample_sd(std::vector<double>{5}) == 0);
}
