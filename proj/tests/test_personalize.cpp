#include <doctest.h>

#include <numeric>

#include "cogsense/nn.hpp"
#include "cogsense/personalize.hpp"

using namespace cogsense;

TEST_CASE("demographic distance") {
  CHECK(demographic_distance({0, 0, 0}, {0, 0, 0}) == 1e-6);
  CHECK(demographic_distance({1, 0, 0}, {0, 0, 0}) == 1.0);
  CHECK(demographic_distance({0.3, 1, -2}, {1, 0, 0.5}) ==
        demographic_distance({1, 0, 0.5}, {0.3, 1, -2}));
  CHECK(demographic_distance({0, 0, 0}, {0, 0, 0}, 1e-3) == 1e-3);
}

TEST_CASE("participant weights follow the softmax of inverse distances") {
  const std::vector<double> two{1.0, 2.0};
  const auto w = participant_weights(two, 10.0);
  CHECK(w[0] == doctest::Approx(6.2246).epsilon(1e-4));
  CHECK(w[1] == doctest::Approx(3.7754).epsilon(1e-4));
  // Hand evaluation: e^1 / (e^1 + e^0.5).
  CHECK(w[0] == doctest::Approx(10 * std::exp(1.0) / (std::exp(1.0) + std::exp(0.5))));

  const std::vector<double> equal(7, 1.3);
  for (double v : participant_weights(equal, 70)) CHECK(v == doctest::Approx(10));
  CHECK(participant_weights(std::vector<double>{0.4}, 33)[0] == doctest::Approx(33));

  // A clamped identical profile dominates without overflow.
  const std::vector<double> clamped{1e-6, 1.0, 2.0};
  const auto wc = participant_weights(clamped, 9);
  CHECK(wc[0] == doctest::Approx(9));
  for (double v : wc) CHECK(std::isfinite(v));

  CHECK_THROWS_AS(participant_weights(std::vector<double>{}, 3), Error);
  CHECK_THROWS_AS(participant_weights(std::vector<double>{0.0}, 3), Error);
}

TEST_CASE("smaller distance means strictly larger weight") {
  const std::vector<double> d{0.5, 0.9, 1.7, 3.0, 8.0};
  const auto w = participant_weights(d, 100);
  for (std::size_t i = 1; i < w.size(); ++i) CHECK(w[i - 1] > w[i]);
  CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(100));
}

TEST_CASE("batch reweighting") {
  const auto b = batch_reweight(std::vector<double>{1, 2});
  CHECK(b[0] == doctest::Approx(0.2689).epsilon(1e-4));
  CHECK(b[1] == doctest::Approx(0.7311).epsilon(1e-4));
  for (double v : batch_reweight(std::vector<double>(8, 3.3))) CHECK(v == doctest::Approx(0.125));

  const std::vector<double> raw{0.1, 4.0, 2.5, 0.7};
  std::vector<double> shifted = raw;
  for (auto& v : shifted) v += 123.0;
  const auto a = batch_reweight(raw), s = batch_reweight(shifted);
  double total = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i] == doctest::Approx(s[i]).epsilon(1e-12));
    total += a[i];
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(batch_reweight(std::vector<double>{}), Error);
}

TEST_CASE("unit weights reproduce the unweighted batch loss") {
  const auto plain = batch_coefficients({}, 4, true);
  const auto ones = batch_coefficients(std::vector<double>(4, 1.0), 4, true);
  const auto ones_raw = batch_coefficients(std::vector<double>(4, 1.0), 4, false);
  CHECK(plain == ones);
  CHECK(plain == ones_raw);
}

TEST_CASE("per-sample weights") {
  std::vector<ParticipantSeries> ps(4);
  const DemographicProfile profiles[] = {{70, Sex::female, 16}, {74, Sex::male, 18}, {80, Sex::female, 17},
                                         {76, Sex::male, 16}};
  for (int i = 0; i < 4; ++i) {
    ps[i].id = "P" + std::to_string(i);
    ps[i].demographics = profiles[i];
  }
  const std::vector<std::size_t> train{0, 1, 2};
  const auto stats = fit_demographics(ps, train);
  std::vector<std::string> samples;
  for (int i = 0; i < 5; ++i) samples.push_back("P0");
  for (int i = 0; i < 2; ++i) samples.push_back("P1");
  for (int i = 0; i < 9; ++i) samples.push_back("P2");

  const auto pw = personalize(ps[3].demographics, ps, train, samples, stats);
  CHECK(pw.participant_ids == std::vector<std::string>{"P0", "P1", "P2"});
  CHECK(std::accumulate(pw.participant_weight.begin(), pw.participant_weight.end(), 0.0) ==
        doctest::Approx(16));
  CHECK(std::accumulate(pw.sample_weight.begin(), pw.sample_weight.end(), 0.0) ==
        doctest::Approx(16).epsilon(1e-9));
  for (double w : pw.sample_weight) CHECK(w > 0);
  // Ratios between participants survive the rescaling.
  CHECK(pw.sample_weight[0] / pw.sample_weight[5] ==
        doctest::Approx(pw.participant_weight[0] / pw.participant_weight[1]));
  CHECK(pw.sample_weight[0] == pw.sample_weight[4]);

  // The nearest demographic neighbour of P3 (male, 76, 16) gets the largest weight.
  const auto nearest = std::min_element(pw.distances.begin(), pw.distances.end()) - pw.distances.begin();
  const auto heaviest =
      std::max_element(pw.participant_weight.begin(), pw.participant_weight.end()) - pw.participant_weight.begin();
  CHECK(nearest == heaviest);

  std::vector<std::string> stray = samples;
  stray.push_back("P3");
  CHECK_THROWS_AS(personalize(ps[3].demographics, ps, train, stray, stats), Error);
}
