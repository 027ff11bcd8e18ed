#include "cogsense/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>

#include "cogsense/augment.hpp"
#include "cogsense/dataset.hpp"
#include "cogsense/features.hpp"
#include "cogsense/logistic.hpp"
#include "cogsense/metrics.hpp"
#include "cogsense/parallel.hpp"
#include "cogsense/personalize.hpp"

namespace cogsense {

namespace fs = std::filesystem;

std::string_view to_string(Setting s) {
  switch (s) {
    case Setting::base: return "base";
    case Setting::augmented: return "aug";
    case Setting::personalized: return "aug+per";
  }
  return "?";
}

std::string_view to_string(FeatureSet f) {
  return f == FeatureSet::sensing ? "sensing" : "sensing+demo";
}

Setting parse_setting(std::string_view s) {
  if (s == "base") return Setting::base;
  if (s == "aug") return Setting::augmented;
  if (s == "aug+per") return Setting::personalized;
  throw Error("unknown setting '" + std::string(s) + "' (expected base, aug or aug+per)");
}

FeatureSet parse_feature_set(std::string_view s) {
  if (s == "sensing") return FeatureSet::sensing;
  if (s == "sensing+demo") return FeatureSet::fused;
  throw Error("unknown feature set '" + std::string(s) + "' (expected sensing or sensing+demo)");
}

bool FoldAudit::clean() const {
  const auto absent = [&](const auto& ids) {
    return std::find(ids.begin(), ids.end(), held_out) == ids.end();
  };
  return absent(standardization_contributors) && absent(demographic_contributors) &&
         absent(pool_owners) && absent(weight_participants) &&
         absent(training_sample_participants) && !batch_participants.contains(held_out);
}

namespace {

std::vector<std::size_t> training_members(const Cohort& cohort, std::size_t held_out) {
  std::vector<std::size_t> members;
  for (std::size_t p = 0; p < cohort.participants.size(); ++p) {
    if (p != held_out) members.push_back(p);
  }
  return members;
}

void check_cohort(const Cohort& cohort) {
  if (cohort.participants.size() < 2) throw Error("LOPO needs at least two participants");
  bool pos = false, neg = false;
  for (const auto& p : cohort.participants) (p.label == 1 ? pos : neg) = true;
  if (!pos || !neg) throw Error("LOPO needs both classes in the cohort");
}

std::vector<std::size_t> sensing_columns() { return FeatureRegistry::standard().sensing_indices(); }

}  // namespace

TrainConfig fold_train_config(const PipelineConfig& config, Setting setting, std::uint64_t seed,
                              std::string_view held_out) {
  TrainConfig tc = config.model;
  tc.epochs = setting == Setting::base ? config.model.epochs : config.epochs_augmented;
  tc.batch_softmax = config.personalization.batch_softmax;
  tc.seed = derive_seed(seed, {hash_string(held_out), 0x7a1});
  return tc;
}

FoldModel fit_fold_model(const Cohort& cohort, std::span<const std::size_t> members,
                         const DemographicProfile& target, std::string_view fold_key,
                         const PipelineConfig& config, RunSpec spec, std::uint64_t seed,
                         FoldAudit* audit) {
  const auto& participants = cohort.participants;
  FoldModel fm;
  fm.stats = fit_standardization(participants, members);
  fm.demographics = fit_demographics(participants, members);

  std::vector<SequenceSample> samples;
  for (auto m : members) {
    for (const auto& w : cohort.windows[m]) samples.push_back(standardize_impute(w, participants[m], fm.stats));
  }

  std::vector<DayPool> pools;
  if (spec.setting != Setting::base) {
    const auto cols = sensing_columns();
    for (auto m : members) pools.push_back(build_day_pool(participants[m], fm.stats, cols, config.augment));
    samples = augment_training_set(samples, pools, config.augment.synthetic_per_sample,
                                   derive_seed(seed, {hash_string(fold_key), 0xa06}));
  }

  if (spec.features == FeatureSet::fused) {
    for (auto& s : samples) {
      s = fuse_demographics(s, participants[cohort.index_of(s.participant_id)].demographics,
                            fm.demographics);
    }
  }

  TrainingSet data;
  std::vector<std::string> sample_pids;
  for (const auto& s : samples) {
    data.inputs.push_back(&s.x);
    data.labels.push_back(s.label);
    sample_pids.push_back(s.participant_id);
  }

  PersonalizationWeights pw;
  if (spec.setting == Setting::personalized && config.personalization.enabled) {
    pw = personalize(target, participants, members, sample_pids, fm.demographics, config.personalization);
    data.weights = pw.sample_weight;
  }

  const bool both = std::count(data.labels.begin(), data.labels.end(), 1) > 0 &&
                    std::count(data.labels.begin(), data.labels.end(), 0) > 0;
  if (!both) {
    std::cerr << "warning: training fold for " << fold_key
              << " has a single class; class weights fall back to 1\n";
  }

  std::set<std::string> batch_pids;
  BatchObserver observer;
  if (audit) {
    observer = [&](std::span<const std::size_t> idx) {
      for (auto i : idx) batch_pids.insert(sample_pids[i]);
    };
  }
  fm.trained = train(data, fold_train_config(config, spec.setting, seed, fold_key), observer);

  if (audit) {
    audit->held_out = std::string(fold_key);
    audit->seed = seed;
    audit->standardization_contributors = fm.stats.contributors;
    audit->demographic_contributors = fm.demographics.contributors;
    audit->pool_owners.clear();
    for (const auto& p : pools) audit->pool_owners.push_back(p.participant_id);
    audit->weight_participants = pw.participant_ids;
    audit->weight_sum = 0.0;
    for (double w : pw.sample_weight) audit->weight_sum += w;
    audit->training_samples = samples.size();
    std::set<std::string> distinct(sample_pids.begin(), sample_pids.end());
    audit->training_sample_participants.assign(distinct.begin(), distinct.end());
    audit->batch_participants = std::move(batch_pids);
    audit->optimizer_steps = fm.trained.steps;
    audit->single_class = !both;
  }
  return fm;
}

std::vector<double> score_windows(const FoldModel& model, const ParticipantSeries& series,
                                  std::span<const RawWindow> windows, FeatureSet features) {
  std::vector<Matrix> inputs;
  for (const auto& w : windows) {
    auto s = standardize_impute(w, series, model.stats);
    if (features == FeatureSet::fused) s = fuse_demographics(s, series.demographics, model.demographics);
    inputs.push_back(std::move(s.x));
  }
  std::vector<const Matrix*> ptrs;
  for (const auto& m : inputs) ptrs.push_back(&m);
  return predict(model.trained.params, ptrs);
}

FoldResult run_fold(const Cohort& cohort, std::size_t held_out, const PipelineConfig& config,
                    RunSpec spec, std::uint64_t seed, FoldAudit* audit) {
  const auto& test = cohort.participants.at(held_out);
  const auto members = training_members(cohort, held_out);
  const auto model = fit_fold_model(cohort, members, test.demographics, test.id, config, spec, seed, audit);

  FoldResult r;
  r.participant_id = test.id;
  r.label = test.label;
  r.seed = seed;
  r.optimizer_steps = model.trained.steps;
  for (const auto& w : cohort.windows[held_out]) r.window_starts.push_back(w.start);
  r.sequence_probabilities = score_windows(model, test, cohort.windows[held_out], spec.features);
  double sum = 0.0;
  for (double p : r.sequence_probabilities) sum += p;
  r.participant_probability = sum / static_cast<double>(r.sequence_probabilities.size());
  return r;
}

std::vector<FoldResult> lopo_run(const Cohort& cohort, const PipelineConfig& config, RunSpec spec,
                                 std::span<const std::uint64_t> seeds, const FoldObserver& observer) {
  check_cohort(cohort);
  const std::size_t n = cohort.participants.size();
  std::vector<FoldResult> results(seeds.size() * n);
  std::mutex observer_mutex;
  parallel_for(results.size(), config.jobs, [&](std::size_t task) {
    const std::uint64_t seed = seeds[task / n];
    FoldAudit audit;
    results[task] = run_fold(cohort, task % n, config, spec, seed, observer ? &audit : nullptr);
    if (observer) {
      std::lock_guard lock(observer_mutex);
      observer(audit);
    }
  });
  return results;
}

const MetricSummary& MetricReport::get(std::string_view level, std::string_view metric) const {
  for (const auto& r : rows) {
    if (r.level == level && r.metric == metric) return r;
  }
  throw Error("report " + setting + "/" + features + " has no " + std::string(level) + " " +
              std::string(metric));
}

namespace {

MetricSummary summarize(std::string level, std::string metric, std::vector<double> values) {
  MetricSummary m{std::move(level), std::move(metric), std::move(values), 0.0, 0.0};
  m.mean = sample_mean(m.per_seed);
  m.sd = m.per_seed.size() > 1 ? sample_sd(m.per_seed) : 0.0;
  return m;
}

}  // namespace

MetricReport summarize_folds(std::string setting, std::string features, std::span<const FoldResult> folds) {
  std::vector<std::uint64_t> seeds;
  for (const auto& f : folds) {
    if (std::find(seeds.begin(), seeds.end(), f.seed) == seeds.end()) seeds.push_back(f.seed);
  }
  const bool has_sequences = std::any_of(folds.begin(), folds.end(),
                                         [](const FoldResult& f) { return !f.sequence_probabilities.empty(); });
  std::vector<double> seq_auc, seq_auprc, par_auc, par_auprc;
  for (auto seed : seeds) {
    std::vector<double> ss, ps;
    std::vector<int> sl, pl;
    for (const auto& f : folds) {
      if (f.seed != seed) continue;
      for (double p : f.sequence_probabilities) {
        ss.push_back(p);
        sl.push_back(f.label);
      }
      ps.push_back(f.participant_probability);
      pl.push_back(f.label);
    }
    if (has_sequences) {
      seq_auc.push_back(auc(ss, sl));
      seq_auprc.push_back(auprc(ss, sl));
    }
    par_auc.push_back(auc(ps, pl));
    par_auprc.push_back(auprc(ps, pl));
  }
  MetricReport report{std::move(setting), std::move(features), {}};
  if (has_sequences) {
    report.rows.push_back(summarize("sequence", "auc", seq_auc));
    report.rows.push_back(summarize("sequence", "auprc", seq_auprc));
  }
  report.rows.push_back(summarize("participant", "auc", par_auc));
  report.rows.push_back(summarize("participant", "auprc", par_auprc));
  return report;
}

MetricReport logistic_baseline(const Cohort& cohort, const LogisticConfig& config,
                               std::vector<FoldResult>* folds) {
  check_cohort(cohort);
  std::vector<FoldResult> results;
  for (std::size_t i = 0; i < cohort.participants.size(); ++i) {
    const auto members = training_members(cohort, i);
    const auto demo = fit_demographics(cohort.participants, members);
    Matrix x(static_cast<Eigen::Index>(members.size()), 3);
    std::vector<int> y;
    for (std::size_t r = 0; r < members.size(); ++r) {
      const auto& p = cohort.participants[members[r]];
      const auto z = standardize_demographics(p.demographics, demo);
      x.row(static_cast<Eigen::Index>(r)) << z[0], z[1], z[2];
      y.push_back(p.label);
    }
    const auto model = fit_logistic(x, y, config);
    const auto& test = cohort.participants[i];
    const auto z = standardize_demographics(test.demographics, demo);
    Eigen::RowVectorXd row(3);
    row << z[0], z[1], z[2];
    FoldResult f;
    f.participant_id = test.id;
    f.label = test.label;
    f.participant_probability = model.predict(row);
    results.push_back(std::move(f));
  }
  auto report = summarize_folds("demographic-logistic", "demo", results);
  if (folds) *folds = std::move(results);
  return report;
}

MetricReport summary_baseline(const Cohort& cohort, const LogisticConfig& config,
                              std::vector<FoldResult>* folds, const FoldObserver& observer) {
  check_cohort(cohort);
  const auto cols = sensing_columns();
  // Raw 4F summaries of every window, computed once.
  std::vector<std::vector<std::vector<double>>> summaries(cohort.participants.size());
  for (std::size_t p = 0; p < cohort.participants.size(); ++p) {
    ParticipantSeries sensing = cohort.participants[p];
    for (auto& d : sensing.days) {
      std::vector<double> v;
      for (auto c : cols) v.push_back(d.values[c]);
      d.values = std::move(v);
    }
    for (const auto& w : cohort.windows[p]) summaries[p].push_back(window_summary_stats(w, sensing));
  }
  const std::size_t width = 4 * cols.size();

  std::vector<FoldResult> results;
  for (std::size_t i = 0; i < cohort.participants.size(); ++i) {
    const auto members = training_members(cohort, i);
    std::vector<double> mean(width, 0.0), sd(width, 0.0), count(width, 0.0);
    for (auto m : members) {
      for (const auto& s : summaries[m]) {
        for (std::size_t c = 0; c < width; ++c) {
          if (!is_missing(s[c])) {
            mean[c] += s[c];
            count[c] += 1.0;
          }
        }
      }
    }
    for (std::size_t c = 0; c < width; ++c) mean[c] = count[c] > 0 ? mean[c] / count[c] : 0.0;
    for (auto m : members) {
      for (const auto& s : summaries[m]) {
        for (std::size_t c = 0; c < width; ++c) {
          if (!is_missing(s[c])) sd[c] += (s[c] - mean[c]) * (s[c] - mean[c]);
        }
      }
    }
    for (std::size_t c = 0; c < width; ++c) sd[c] = count[c] > 0 ? std::sqrt(sd[c] / count[c]) : 0.0;
    const auto to_row = [&](const std::vector<double>& s) {
      Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(width));
      for (std::size_t c = 0; c < width; ++c) {
        if (!is_missing(s[c]) && sd[c] > 0.0) row[static_cast<Eigen::Index>(c)] = (s[c] - mean[c]) / sd[c];
      }
      return row;
    };

    std::size_t n = 0;
    for (auto m : members) n += summaries[m].size();
    Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(width));
    std::vector<int> y;
    std::set<std::string> owners;
    Eigen::Index r = 0;
    for (auto m : members) {
      owners.insert(cohort.participants[m].id);
      for (const auto& s : summaries[m]) {
        x.row(r++) = to_row(s);
        y.push_back(cohort.participants[m].label);
      }
    }
    const auto model = fit_logistic(x, y, config);

    const auto& test = cohort.participants[i];
    FoldResult f;
    f.participant_id = test.id;
    f.label = test.label;
    double sum = 0.0;
    for (std::size_t w = 0; w < summaries[i].size(); ++w) {
      f.window_starts.push_back(cohort.windows[i][w].start);
      f.sequence_probabilities.push_back(model.predict(to_row(summaries[i][w])));
      sum += f.sequence_probabilities.back();
    }
    f.participant_probability = sum / static_cast<double>(f.sequence_probabilities.size());
    results.push_back(std::move(f));

    if (observer) {
      FoldAudit audit;
      audit.held_out = test.id;
      audit.standardization_contributors.assign(owners.begin(), owners.end());
      audit.training_sample_participants = audit.standardization_contributors;
      audit.training_samples = n;
      observer(audit);
    }
  }
  auto report = summarize_folds("summary-logistic", "sensing", results);
  if (folds) *folds = std::move(results);
  return report;
}

void write_metrics_csv(const fs::path& file, std::span<const MetricReport> reports) {
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file.string());
  out << "setting,features,level,metric,mean,sd,n\n";
  for (const auto& rep : reports) {
    for (const auto& row : rep.rows) {
      out << rep.setting << ',' << rep.features << ',' << row.level << ',' << row.metric << ','
          << format_number(row.mean) << ',' << format_number(row.sd) << ',' << row.per_seed.size()
          << '\n';
    }
  }
}

void write_predictions_csv(const fs::path& file, std::span<const PredictionSet> sets) {
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file.string());
  out << "setting,features,seed,participant_id,label,level,window_start,probability\n";
  for (const auto& set : sets) {
    for (const auto& f : set.folds) {
      const std::string prefix = set.setting + ',' + set.features + ',' + std::to_string(f.seed) + ',' +
                                 f.participant_id + ',' + std::to_string(f.label) + ',';
      for (std::size_t k = 0; k < f.sequence_probabilities.size(); ++k) {
        out << prefix << "sequence," << format_date(f.window_starts[k]) << ','
            << format_number(f.sequence_probabilities[k]) << '\n';
      }
      out << prefix << "participant,," << format_number(f.participant_probability) << '\n';
    }
  }
}

RoutineEmbedding routine_embedding(const Cohort& cohort, double variance_target) {
  std::vector<std::size_t> all(cohort.participants.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const auto stats = fit_standardization(cohort.participants, all);
  const auto cols = sensing_columns();
  RoutineEmbedding e;
  std::size_t n = 0;
  for (const auto& p : cohort.participants) n += p.days.size();
  Matrix data(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cols.size()));
  Eigen::Index r = 0;
  for (const auto& p : cohort.participants) {
    for (const auto& d : p.days) {
      const auto z = standardize_day(d.values, stats);
      for (std::size_t c = 0; c < cols.size(); ++c) data(r, static_cast<Eigen::Index>(c)) = z[static_cast<Eigen::Index>(cols[c])];
      ++r;
      e.participant_ids.push_back(p.id);
      e.dates.push_back(d.date);
      e.labels.push_back(p.label);
    }
  }
  e.pca = pca_embed(data, variance_target);
  return e;
}

void write_pca_embedding_csv(const fs::path& file, const RoutineEmbedding& e) {
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file.string());
  out << "participant_id,date,label";
  for (std::size_t k = 0; k < e.pca.retained; ++k) out << ",pc" << k + 1;
  out << '\n';
  for (std::size_t i = 0; i < e.participant_ids.size(); ++i) {
    out << e.participant_ids[i] << ',' << format_date(e.dates[i]) << ',' << e.labels[i];
    for (std::size_t k = 0; k < e.pca.retained; ++k) {
      out << ',' << format_number(e.pca.projections(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)));
    }
    out << '\n';
  }
}

double routine_separation(const RoutineEmbedding& e) {
  const Matrix& x = e.pca.projections;
  double sw = 0.0, sw2 = 0.0, sb = 0.0, sb2 = 0.0;
  double nw = 0.0, nb = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < x.rows(); ++j) {
      const double d = (x.row(i) - x.row(j)).norm();
      if (e.participant_ids[static_cast<std::size_t>(i)] == e.participant_ids[static_cast<std::size_t>(j)]) {
        sw += d;
        sw2 += d * d;
        nw += 1.0;
      } else {
        sb += d;
        sb2 += d * d;
        nb += 1.0;
      }
    }
  }
  if (nw < 2.0 || nb < 2.0) throw Error("routine separation needs repeated days from several participants");
  const double mw = sw / nw, mb = sb / nb;
  const double vw = (sw2 - nw * mw * mw) / (nw - 1.0);
  const double vb = (sb2 - nb * mb * mb) / (nb - 1.0);
  const double pooled = std::sqrt(((nw - 1.0) * vw + (nb - 1.0) * vb) / (nw + nb - 2.0));
  return (mb - mw) / pooled;
}

}  // namespace cogsense
