#include <doctest.h>

#include <random>

#include "cogsense/sequence.hpp"

using namespace cogsense;

namespace {

const Date kStart = parse_date("2024-01-01");

/// Valid days at the given day offsets from kStart, values {offset, 2*offset}.
ParticipantSeries series_at(const std::vector<int>& offsets, std::string id = "A", int label = 0) {
  ParticipantSeries s;
  s.id = std::move(id);
  s.label = label;
  for (int o : offsets) s.days.push_back({kStart + std::chrono::days(o), {double(o), 2.0 * o}});
  return s;
}

std::vector<int> run(int from, int n) {
  std::vector<int> v(n);
  std::iota(v.begin(), v.end(), from);
  return v;
}

}  // namespace

TEST_CASE("sliding windows") {
  CHECK(build_windows(series_at(run(0, 30))).size() == 1);
  CHECK(build_windows(series_at(run(0, 31))).size() == 2);
  CHECK(build_windows(series_at(run(0, 29))).empty());
  CHECK(build_windows(series_at({})).empty());
  for (int d : {30, 35, 47, 60}) {
    CHECK(build_windows(series_at(run(0, d))).size() == static_cast<std::size_t>(std::max(0, d - 29)));
  }

  // 30-day span with 22 or 23 valid days: the rest are calendar gaps.
  std::vector<int> days22 = run(0, 21), days23 = run(0, 22);
  days22.push_back(29);
  days23.push_back(29);
  CHECK(build_windows(series_at(days22)).empty());
  const auto w = build_windows(series_at(days23));
  REQUIRE(w.size() == 1);
  CHECK(w[0].valid_count() == 23);
  CHECK(w[0].rows[25] == -1);
  CHECK(w[0].rows[29] == 22);
  CHECK(w[0].start == kStart);
}

TEST_CASE("participant retention") {
  std::vector<ParticipantSeries> all{series_at(run(0, 33), "four"), series_at(run(0, 34), "five"),
                                     series_at(run(0, 10), "none")};
  const auto c = retain_participants(all);
  REQUIRE(c.participants.size() == 1);
  CHECK(c.participants[0].id == "five");
  CHECK(c.window_count() == 5);
  CHECK(c.index_of("five") == 0);
}

TEST_CASE("standardization") {
  std::vector<ParticipantSeries> ps{series_at({0, 2}, "A")};
  ps[0].days[0].values = {0.0, 5.0, kMissing};
  ps[0].days[1].values = {2.0, 5.0, kMissing};
  const std::vector<std::size_t> members{0};
  const auto st = fit_standardization(ps, members);
  CHECK(st.mean[0] == 1);
  CHECK(st.stddev[0] == 1);
  CHECK_FALSE(st.constant[0]);
  CHECK(st.stddev[1] == 0);
  CHECK(st.constant[1]);
  CHECK(st.constant[2]);
  CHECK(st.contributors == std::vector<std::string>{"A"});

  const std::vector<double> v{2.0, 5.0, kMissing};
  const auto z = standardize_day(v, st);
  CHECK(z[0] == 1);
  CHECK(z[1] == 0);
  CHECK(z[2] == 0);
  const std::vector<double> at_mean{1.0, 7.0, 3.0};
  CHECK(standardize_day(at_mean, st)[0] == 0);
  CHECK(destandardize_day(standardize_day(std::vector<double>{3.5, 5, 0}, st), st)[0] == doctest::Approx(3.5));

  CHECK_THROWS_AS(fit_standardization(ps, std::vector<std::size_t>{}), Error);
}

TEST_CASE("standardization ignores participants outside the fold") {
  std::vector<ParticipantSeries> ps{series_at(run(0, 5), "A"), series_at(run(100, 5), "B")};
  const auto with = fit_standardization(ps, std::vector<std::size_t>{0, 1});
  const auto without = fit_standardization(ps, std::vector<std::size_t>{0});
  CHECK(without.mean[0] == 2);
  CHECK(with.mean[0] != without.mean[0]);
  CHECK(without.contributors.size() == 1);
}

TEST_CASE("round trip through standardization") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(5, 3);
  ParticipantSeries s;
  for (int d = 0; d < 40; ++d) s.days.push_back({kStart + std::chrono::days(d), {n(rng), n(rng), n(rng)}});
  const auto st = fit_standardization(std::span(&s, 1), std::vector<std::size_t>{0});
  for (const auto& d : s.days) {
    const auto back = destandardize_day(standardize_day(d.values, st), st);
    for (std::size_t f = 0; f < 3; ++f) CHECK(back[f] == doctest::Approx(d.values[f]).epsilon(1e-12));
  }
}

TEST_CASE("standardize_impute fills invalid rows with zero") {
  auto s = series_at(run(0, 23));
  s.days.push_back({kStart + std::chrono::days(29), {29.0, kMissing}});
  const auto windows = build_windows(s);
  REQUIRE(windows.size() == 1);
  const auto st = fit_standardization(std::span(&s, 1), std::vector<std::size_t>{0});
  const auto sample = standardize_impute(windows[0], s, st);
  CHECK(sample.x.rows() == 30);
  CHECK(sample.x.cols() == 2);
  CHECK(sample.x.allFinite());
  CHECK(std::count(sample.valid_mask.begin(), sample.valid_mask.end(), true) == 24);
  CHECK(sample.x.row(25).isZero());
  CHECK(sample.row_sources[25] == -1);
  CHECK(sample.x(29, 1) == 0);
  CHECK(sample.x(29, 0) == doctest::Approx((29 - st.mean[0]) / st.stddev[0]));
  CHECK_FALSE(sample.is_synthetic);
  CHECK(sample.participant_id == "A");
}

TEST_CASE("demographic fusion") {
  std::vector<ParticipantSeries> ps{series_at(run(0, 30), "A"), series_at(run(0, 30), "B")};
  ps[0].demographics = {70, Sex::female, 16};
  ps[1].demographics = {80, Sex::male, 18};
  const std::vector<std::size_t> members{0, 1};
  const auto ds = fit_demographics(ps, members);
  CHECK(ds.mean[0] == 75);
  CHECK(ds.stddev[0] == 5);
  const auto mid = standardize_demographics({75, Sex::female, 17}, ds);
  CHECK(mid[0] == 0);
  CHECK(mid[2] == 0);

  const auto st = fit_standardization(ps, members);
  const auto sample = standardize_impute(build_windows(ps[0])[0], ps[0], st);
  const auto fused = fuse_demographics(sample, ps[1].demographics, ds);
  CHECK(fused.x.cols() == sample.x.cols() + 3);
  for (Eigen::Index r = 0; r < fused.x.rows(); ++r) {
    CHECK(fused.x(r, 2) == 1);
    CHECK(fused.x(r, 3) == 1);
    CHECK(fused.x(r, 4) == 1);
    CHECK(fused.x.row(r).head(2) == sample.x.row(r));
  }
}

TEST_CASE("window summary statistics") {
  auto s = series_at(run(0, 30));
  s.days[3].values[1] = kMissing;
  for (auto& d : s.days) d.values.push_back(4.0);
  s.days[0].values.push_back(kMissing);
  for (std::size_t i = 1; i < s.days.size(); ++i) s.days[i].values.push_back(kMissing);
  const auto w = build_windows(s);
  const auto v = window_summary_stats(w[0], s);
  REQUIRE(v.size() == 16);

  // Brute force over feature 1 with day 3 missing.
  std::vector<double> xs;
  for (int o = 0; o < 30; ++o) {
    if (o != 3) xs.push_back(2.0 * o);
  }
  const double m = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  double ss = 0;
  for (double x : xs) ss += (x - m) * (x - m);
  CHECK(v[1] == doctest::Approx(m));
  CHECK(v[4 + 1] == doctest::Approx(std::sqrt(ss / xs.size())));
  CHECK(v[8 + 1] == 0);
  CHECK(v[12 + 1] == 58);

  // Constant feature.
  CHECK(v[2] == 4);
  CHECK(v[6] == 0);
  CHECK(v[10] == v[14]);
  // Never observed.
  CHECK(is_missing(v[3]));
  CHECK(is_missing(v[15]));
}

TEST_CASE("single valid day summary") {
  auto s = series_at(run(0, 30));
  RawWindow w{kStart, std::vector<int>(30, -1)};
  w.rows[7] = 7;
  const auto v = window_summary_stats(w, s);
  CHECK(v[0] == 7);
  CHECK(v[2] == 0);
  CHECK(v[4] == 7);
  CHECK(v[6] == 7);
}
