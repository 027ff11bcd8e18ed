#include <doctest.h>

#include <fstream>
#include <numeric>

#include "cogsense/experiment.hpp"
#include "support.hpp"

using namespace cogsense;

namespace {

/// In-memory cohort over the standard registry. Impaired participants carry
/// a shifted first feature; education follows the label when `demo_effect`.
Cohort make_cohort(const std::vector<int>& labels, std::size_t days = 34, std::uint64_t seed = 1,
                   bool demo_effect = true) {
  const std::size_t width = FeatureRegistry::standard().size();
  Rng rng(seed);
  std::normal_distribution<double> g;
  std::vector<ParticipantSeries> all;
  for (std::size_t p = 0; p < labels.size(); ++p) {
    ParticipantSeries s;
    s.id = "S" + std::to_string(10 + p);
    s.label = labels[p];
    s.demographics = {70.0 + static_cast<double>(p), p % 2 ? Sex::male : Sex::female,
                      demo_effect ? 16.0 + 2.0 * labels[p] : 17.0};
    const double offset = 0.5 * g(rng);  // participant routine
    for (std::size_t d = 0; d < days; ++d) {
      DayRecord r{parse_date("2024-02-01") + std::chrono::days(d), std::vector<double>(width)};
      for (auto& v : r.values) v = g(rng) + offset;
      r.values[0] += 2.0 * labels[p];
      r.values[width - 1] = 17.0;
      if (d % 7 == 3) r.values[5] = kMissing;
      s.days.push_back(std::move(r));
    }
    all.push_back(std::move(s));
  }
  return retain_participants(std::move(all));
}

PipelineConfig tiny_config() {
  PipelineConfig c;
  c.model.hidden = 3;
  c.model.dense = 3;
  c.model.batch_size = 16;
  c.model.epochs = 3;
  c.epochs_augmented = 1;
  c.model.learning_rate = 0.01;
  c.augment.tau_percentile = 50.0;
  return c;
}

}  // namespace

TEST_CASE("setting and feature set names") {
  CHECK(to_string(Setting::personalized) == "aug+per");
  CHECK(parse_setting("aug") == Setting::augmented);
  CHECK(parse_feature_set("sensing+demo") == FeatureSet::fused);
  CHECK_THROWS_AS(parse_setting("fancy"), Error);
  CHECK_THROWS_AS(parse_feature_set("demo"), Error);
}

TEST_CASE("three participants give three folds trained on two") {
  const auto cohort = make_cohort({0, 1, 0});
  REQUIRE(cohort.participants.size() == 3);
  std::vector<FoldAudit> audits;
  const std::vector<std::uint64_t> seeds{0};
  const auto folds = lopo_run(cohort, tiny_config(), {}, seeds, [&](const FoldAudit& a) { audits.push_back(a); });
  REQUIRE(folds.size() == 3);
  REQUIRE(audits.size() == 3);
  for (const auto& a : audits) {
    CHECK(a.standardization_contributors.size() == 2);
    CHECK(a.training_sample_participants.size() == 2);
    CHECK(a.clean());
  }
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(folds[i].participant_id == cohort.participants[i].id);
    CHECK(folds[i].sequence_probabilities.size() == cohort.windows[i].size());
    const double mean = std::accumulate(folds[i].sequence_probabilities.begin(),
                                        folds[i].sequence_probabilities.end(), 0.0) /
                        static_cast<double>(folds[i].sequence_probabilities.size());
    CHECK(std::abs(folds[i].participant_probability - mean) < 1e-12);
  }
  // The held-out impaired participant leaves a single-class training fold.
  CHECK(audits[1].single_class);
  CHECK_FALSE(audits[0].single_class);
}

TEST_CASE("leakage audit covers every fitted structure") {
  const auto cohort = make_cohort({0, 1, 0, 1});
  auto cfg = tiny_config();
  const RunSpec spec{Setting::personalized, FeatureSet::fused};
  for (std::size_t h = 0; h < cohort.participants.size(); ++h) {
    FoldAudit audit;
    run_fold(cohort, h, cfg, spec, 3, &audit);
    CHECK(audit.held_out == cohort.participants[h].id);
    CHECK(audit.clean());
    CHECK(audit.pool_owners.size() == 3);
    CHECK(audit.weight_participants.size() == 3);
    CHECK(audit.demographic_contributors.size() == 3);
    CHECK(audit.batch_participants.size() == 3);
    CHECK(audit.weight_sum == doctest::Approx(static_cast<double>(audit.training_samples)).epsilon(1e-9));

    // A deliberately leaky audit must fail the check.
    FoldAudit leaky = audit;
    leaky.pool_owners.push_back(audit.held_out);
    CHECK_FALSE(leaky.clean());
  }
}

TEST_CASE("standardization differs with and without the held-out participant") {
  const auto cohort = make_cohort({0, 1, 0, 1});
  const std::vector<std::size_t> all{0, 1, 2, 3}, without{0, 2, 3};
  const auto a = fit_standardization(cohort.participants, all);
  const auto b = fit_standardization(cohort.participants, without);
  CHECK(a.mean[0] != b.mean[0]);
  FoldAudit audit;
  const auto fm = fit_fold_model(cohort, without, cohort.participants[1].demographics, "S11", tiny_config(),
                                 {}, 0, &audit);
  CHECK(fm.stats.mean == b.mean);
}

TEST_CASE("augmented schedule keeps the optimizer step count") {
  const auto cohort = make_cohort({0, 1, 0, 1});
  auto cfg = tiny_config();
  cfg.model.batch_size = 5;
  cfg.model.epochs = 6;
  cfg.epochs_augmented = 1;
  FoldAudit base, aug;
  run_fold(cohort, 0, cfg, {Setting::base, FeatureSet::sensing}, 0, &base);
  run_fold(cohort, 0, cfg, {Setting::augmented, FeatureSet::sensing}, 0, &aug);
  CHECK(aug.training_samples == 6 * base.training_samples);
  CHECK(base.optimizer_steps == 6 * steps_per_epoch(base.training_samples, 5));
  CHECK(aug.optimizer_steps == steps_per_epoch(aug.training_samples, 5));
  CHECK(base.optimizer_steps == aug.optimizer_steps);
}

TEST_CASE("runs are deterministic and independent of the thread count") {
  const auto cohort = make_cohort({0, 1, 0, 1});
  auto cfg = tiny_config();
  const std::vector<std::uint64_t> seeds{0, 5};
  const RunSpec spec{Setting::augmented, FeatureSet::sensing};
  const auto a = lopo_run(cohort, cfg, spec, seeds);
  cfg.jobs = 3;
  const auto b = lopo_run(cohort, cfg, spec, seeds);
  REQUIRE(a.size() == 8);
  REQUIRE(b.size() == 8);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].participant_id == b[i].participant_id);
    CHECK(a[i].seed == b[i].seed);
    CHECK(a[i].sequence_probabilities == b[i].sequence_probabilities);
  }
  CHECK(a[0].seed == 0);
  CHECK(a[4].seed == 5);
  CHECK(a[0].sequence_probabilities != a[4].sequence_probabilities);
}

TEST_CASE("cohort preconditions") {
  auto cfg = tiny_config();
  const std::vector<std::uint64_t> seeds{0};
  CHECK_THROWS_AS(lopo_run(make_cohort({1}), cfg, {}, seeds), Error);
  CHECK_THROWS_AS(lopo_run(make_cohort({0, 0, 0}), cfg, {}, seeds), Error);
}

TEST_CASE("metric summaries") {
  std::vector<FoldResult> folds;
  for (std::uint64_t seed : {0, 1, 2}) {
    for (int p = 0; p < 4; ++p) {
      FoldResult f;
      f.participant_id = "P" + std::to_string(p);
      f.label = p % 2;
      f.seed = seed;
      f.sequence_probabilities = {0.1 * p + 0.05 * seed, 0.3};
      f.window_starts = {parse_date("2024-01-01"), parse_date("2024-01-02")};
      f.participant_probability = (f.sequence_probabilities[0] + 0.3) / 2;
      folds.push_back(f);
    }
  }
  const auto r = summarize_folds("base", "sensing", folds);
  CHECK(r.rows.size() == 4);
  const auto& pa = r.get("participant", "auc");
  CHECK(pa.per_seed.size() == 3);
  CHECK(pa.mean == doctest::Approx(0.75));
  CHECK(pa.sd == 0);
  CHECK_THROWS_AS(r.get("participant", "f1"), Error);

  const std::vector<FoldResult> one(folds.begin(), folds.begin() + 4);
  const auto single = summarize_folds("base", "sensing", one);
  for (const auto& row : single.rows) {
    CHECK(row.per_seed.size() == 1);
    CHECK(row.sd == 0);
  }

  testing::TempDir dir("metrics");
  const std::vector<MetricReport> reports{r, single};
  write_metrics_csv(dir.path() / "m.csv", reports);
  std::ifstream in(dir.path() / "m.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "setting,features,level,metric,mean,sd,n");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 8);

  const std::vector<PredictionSet> preds{{"base", "sensing", folds}};
  write_predictions_csv(dir.path() / "p.csv", preds);
  std::ifstream pin(dir.path() / "p.csv");
  std::getline(pin, line);
  CHECK(line == "setting,features,seed,participant_id,label,level,window_start,probability");
  rows = 0;
  while (std::getline(pin, line)) ++rows;
  CHECK(rows == 12 * 3);  // two sequence rows and one participant row per fold
}

TEST_CASE("demographic baseline") {
  const auto cohort = make_cohort({0, 1, 0, 1, 0, 1});
  std::vector<FoldResult> folds;
  const auto r = logistic_baseline(cohort, {}, &folds);
  CHECK(r.setting == "demographic-logistic");
  CHECK(r.rows.size() == 2);
  CHECK(r.get("participant", "auc").mean == 1.0);
  CHECK(folds.size() == 6);
  std::vector<FoldResult> again;
  logistic_baseline(cohort, {}, &again);
  for (std::size_t i = 0; i < folds.size(); ++i) {
    CHECK(folds[i].participant_probability == again[i].participant_probability);
  }
}

TEST_CASE("summary baseline") {
  SUBCASE("planted feature is recovered, folds stay isolated") {
    // Only the first five features vary; the first carries the label.
    auto cohort = make_cohort({0, 1, 0, 1, 0, 1}, 34, 2, false);
    for (auto& p : cohort.participants) {
      for (auto& d : p.days) std::fill(d.values.begin() + 5, d.values.end(), 1.0);
    }
    std::vector<FoldAudit> audits;
    const auto r = summary_baseline(cohort, {}, nullptr, [&](const FoldAudit& a) { audits.push_back(a); });
    CHECK(r.get("participant", "auc").mean > 0.8);
    CHECK(audits.size() == 6);
    for (const auto& a : audits) CHECK(a.clean());
  }
  SUBCASE("constant features score at chance") {
    auto cohort = make_cohort({0, 1, 0, 1}, 34, 3, false);
    for (auto& p : cohort.participants) {
      for (auto& d : p.days) std::fill(d.values.begin(), d.values.end(), 1.0);
    }
    const auto r = summary_baseline(cohort, {});
    CHECK(r.get("participant", "auc").mean == 0.5);
  }
}

TEST_CASE("routine embedding") {
  const auto cohort = make_cohort({0, 1, 0, 1});
  const auto e = routine_embedding(cohort, 0.95);
  CHECK(e.participant_ids.size() == 4 * 34);
  CHECK(e.pca.projections.rows() == 4 * 34);
  CHECK(e.pca.explained_by_retained() >= 0.95);
  // Participant offsets make days of one person closer to each other.
  CHECK(routine_separation(e) > 0.0);

  testing::TempDir dir("pca");
  write_pca_embedding_csv(dir.path() / "e.csv", e);
  std::ifstream in(dir.path() / "e.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header.rfind("participant_id,date,label,pc1", 0) == 0);
}
