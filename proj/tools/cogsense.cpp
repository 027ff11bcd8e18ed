// cogsense: synthetic cohorts, featurization, windowing, augmentation,
// training and leave-one-participant-out evaluation from the shell.

#include <CLI11.hpp>
#include <charconv>

#include <fstream>
#include <iostream>
#include <numeric>
#include <set>

#include "cogsense/augment.hpp"
#include "cogsense/config.hpp"
#include "cogsense/dataset.hpp"
#include "cogsense/experiment.hpp"
#include "cogsense/metrics.hpp"
#include "cogsense/synth.hpp"

namespace fs = std::filesystem;
using namespace cogsense;

namespace {

struct Common {
  std::string config_file;
  std::size_t jobs = 0;  // 0 = keep the config value
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_file, "Pipeline config (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--jobs", c.jobs, "Worker threads (default: config value)");
}

PipelineConfig resolve_config(const Common& c) {
  PipelineConfig cfg = c.config_file.empty() ? PipelineConfig{} : load_config(c.config_file);
  apply_environment(cfg);
  if (c.jobs > 0) cfg.jobs = c.jobs;
  return cfg;
}

void require_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error("input directory not found: " + dir.string());
}

Cohort load_windows(const fs::path& data, const PipelineConfig& cfg) {
  require_dir(data);
  auto cohort = retain_participants(read_feature_table(data), cfg.window);
  if (cohort.participants.empty()) throw Error("no participant in " + data.string() + " has enough windows");
  return cohort;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text, const PipelineConfig& cfg) {
  if (text.empty()) return cfg.evaluate.seeds;
  std::vector<std::uint64_t> seeds;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::uint64_t seed = 0;
    const auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), seed);
    if (item.empty() || ec != std::errc{} || end != item.data() + item.size()) {
      throw Error("--seeds expects comma-separated integers, got '" + text + "'");
    }
    seeds.push_back(seed);
  }
  if (seeds.empty()) throw Error("--seeds is empty");
  return seeds;
}

void print_report(const MetricReport& r) {
  for (const auto& row : r.rows) {
    std::printf("%-20s %-14s %-12s %-6s %.4f +/- %.4f (n=%zu)\n", r.setting.c_str(), r.features.c_str(),
                row.level.c_str(), row.metric.c_str(), row.mean, row.sd, row.per_seed.size());
  }
}

void write_embedding(const fs::path& out, const Cohort& cohort, const PipelineConfig& cfg) {
  const auto e = routine_embedding(cohort, cfg.evaluate.pca_variance);
  write_pca_embedding_csv(out / "pca_embedding.csv", e);
  std::ofstream v(out / "pca_variance.csv");
  v << "component,eigenvalue,explained_ratio,retained\n";
  for (Eigen::Index k = 0; k < e.pca.eigenvalues.size(); ++k) {
    v << k + 1 << ',' << format_number(e.pca.eigenvalues[k]) << ','
      << format_number(e.pca.explained_ratio[k]) << ','
      << (static_cast<std::size_t>(k) < e.pca.retained ? 1 : 0) << '\n';
  }
}

int run_synth(const std::string& spec_file, const fs::path& out, const Common& c) {
  const auto cfg = resolve_config(c);
  CohortSpec spec = spec_file.empty() ? CohortSpec{} : load_cohort_spec(spec_file);
  if (std::getenv("COGSENSE_SEED")) spec.seed = cfg.seed;
  generate_cohort(spec, out, cfg.jobs);
  std::cout << "wrote " << spec.participants << " participants to " << out.string() << '\n';
  return 0;
}

int run_featurize(const fs::path& cohort_dir, const fs::path& out, const Common& c) {
  const auto cfg = resolve_config(c);
  require_dir(cohort_dir);
  const auto participants = load_cohort(cohort_dir, cfg.features.coverage);
  const auto series = featurize_cohort(participants, cfg.features, cfg.jobs);
  write_feature_table(out, series);
  std::size_t days = 0, valid = 0;
  for (const auto& p : participants) days += p.days.size();
  for (const auto& s : series) valid += s.days.size();
  std::cout << participants.size() << " participants, " << valid << " of " << days
            << " days valid; wrote " << (out / "features.csv").string() << '\n';
  return 0;
}

int run_sequence(const fs::path& data, const fs::path& out, const Common& c) {
  const auto cfg = resolve_config(c);
  const auto cohort = load_windows(data, cfg);
  fs::create_directories(out);
  write_sequence_index(out / "sequences.csv", cohort);
  std::vector<std::size_t> all(cohort.participants.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  write_standardization(out / "standardization.csv", fit_standardization(cohort.participants, all));
  std::cout << cohort.participants.size() << " participants, " << cohort.window_count()
            << " sequences\n";
  return 0;
}

int run_augment(const fs::path& data, const fs::path& out, std::optional<std::size_t> k,
                std::optional<std::uint64_t> seed, std::optional<double> tau, const Common& c) {
  auto cfg = resolve_config(c);
  if (k) cfg.augment.synthetic_per_sample = *k;
  if (tau) cfg.augment.tau_percentile = *tau;
  const std::uint64_t base_seed = seed.value_or(cfg.seed);
  const auto cohort = load_windows(data, cfg);
  std::vector<std::size_t> all(cohort.participants.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const auto stats = fit_standardization(cohort.participants, all);
  const auto cols = FeatureRegistry::standard().sensing_indices();
  fs::create_directories(out);

  std::ofstream idx(out / "replacement_index.csv");
  idx << "participant_id,days,tau,days_with_candidates\n";
  std::ofstream aug(out / "augmented.csv");
  aug << "participant_id,window_start,replica,row_sources\n";
  std::size_t synthetic = 0;
  for (std::size_t p = 0; p < cohort.participants.size(); ++p) {
    const auto& s = cohort.participants[p];
    const auto pool = build_day_pool(s, stats, cols, cfg.augment);
    std::size_t with = 0;
    for (const auto& cand : pool.index.candidates) with += cand.empty() ? 0 : 1;
    idx << s.id << ',' << pool.index.size() << ',' << format_number(pool.index.tau) << ',' << with << '\n';
    std::vector<SequenceSample> samples;
    for (const auto& w : cohort.windows[p]) samples.push_back(standardize_impute(w, s, stats));
    const std::array<DayPool, 1> pools{pool};
    const auto augmented = augment_training_set(samples, pools, cfg.augment.synthetic_per_sample, base_seed);
    for (std::size_t i = samples.size(); i < augmented.size(); ++i) {
      const auto& a = augmented[i];
      aug << a.participant_id << ',' << format_date(a.window_start) << ','
          << (i - samples.size()) % cfg.augment.synthetic_per_sample << ',';
      for (std::size_t r = 0; r < a.row_sources.size(); ++r) {
        if (r) aug << ';';
        aug << (a.row_sources[r] >= 0 ? format_date(s.days[static_cast<std::size_t>(a.row_sources[r])].date)
                                      : std::string("-"));
      }
      aug << '\n';
      ++synthetic;
    }
  }
  std::cout << synthetic << " synthetic sequences from " << cohort.window_count() << " originals\n";
  return 0;
}

int run_train(const fs::path& data, const fs::path& out, const std::string& setting_name,
              const std::string& feature_name, const std::string& holdout, const Common& c) {
  const auto cfg = resolve_config(c);
  const auto cohort = load_windows(data, cfg);
  const RunSpec spec{parse_setting(setting_name), parse_feature_set(feature_name)};
  std::vector<std::size_t> members;
  std::size_t held = cohort.participants.size();
  if (!holdout.empty()) held = cohort.index_of(holdout);
  for (std::size_t p = 0; p < cohort.participants.size(); ++p) {
    if (p != held) members.push_back(p);
  }
  if (spec.setting == Setting::personalized && holdout.empty()) {
    throw Error("aug+per weights training samples toward a test participant; pass --holdout");
  }
  const DemographicProfile target = holdout.empty() ? DemographicProfile{} : cohort.participants[held].demographics;
  const auto model = fit_fold_model(cohort, members, target, holdout.empty() ? "all" : holdout, cfg,
                                    spec, cfg.seed);
  fs::create_directories(out);
  save_checkpoint(out / "model.bin", model.trained.params);
  write_standardization(out / "standardization.csv", model.stats);
  std::ofstream log(out / "train_log.csv");
  log << "epoch,loss\n";
  for (std::size_t e = 0; e < model.trained.epoch_loss.size(); ++e) {
    log << e + 1 << ',' << format_number(model.trained.epoch_loss[e]) << '\n';
  }
  std::cout << "trained " << model.trained.steps << " steps; wrote " << (out / "model.bin").string() << '\n';
  if (!holdout.empty()) {
    const auto& test = cohort.participants[held];
    const auto probs = score_windows(model, test, cohort.windows[held], spec.features);
    std::ofstream pred(out / "predictions.csv");
    pred << "participant_id,window_start,probability\n";
    for (std::size_t k = 0; k < probs.size(); ++k) {
      pred << test.id << ',' << format_date(cohort.windows[held][k].start) << ',' << format_number(probs[k]) << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cogsense: cognitive-impairment detection from passive smartphone sensing"};
  app.require_subcommand(1);
  Common common;

  std::string spec_file, out_dir, cohort_dir, data_dir, setting = "base", features = "sensing",
                                                        seeds, holdout;
  std::optional<std::size_t> k;
  std::optional<std::uint64_t> aug_seed;
  std::optional<double> tau;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic cohort");
  synth->add_option("--spec", spec_file, "Cohort spec (JSON); defaults when omitted")->check(CLI::ExistingFile);
  synth->add_option("--out", out_dir, "Output cohort directory")->required();
  add_common(synth, common);

  auto* featurize = app.add_subcommand("featurize", "Daily features for every valid day");
  featurize->add_option("--cohort", cohort_dir, "Cohort directory")->required();
  featurize->add_option("--out", out_dir, "Output directory")->required();
  add_common(featurize, common);

  auto* sequence = app.add_subcommand("sequence", "Build 30-day windows");
  sequence->add_option("--data", data_dir, "featurize output directory")->required();
  sequence->add_option("--out", out_dir, "Output directory")->required();
  add_common(sequence, common);

  auto* augment = app.add_subcommand("augment", "Routine-aware synthetic sequences");
  augment->add_option("--data", data_dir, "featurize output directory")->required();
  augment->add_option("--out", out_dir, "Output directory")->required();
  augment->add_option("--k", k, "Synthetic sequences per original");
  augment->add_option("--seed", aug_seed, "Augmentation seed");
  augment->add_option("--tau-percentile", tau, "Distance threshold percentile")->check(CLI::Range(0.0, 100.0));
  add_common(augment, common);

  auto* train = app.add_subcommand("train", "Train one model and save a checkpoint");
  train->add_option("--data", data_dir, "featurize output directory")->required();
  train->add_option("--out", out_dir, "Output directory")->required();
  train->add_option("--setting", setting, "base | aug | aug+per");
  train->add_option("--features", features, "sensing | sensing+demo");
  train->add_option("--holdout", holdout, "Participant to hold out and score");
  add_common(train, common);

  auto* evaluate = app.add_subcommand("evaluate", "Leave-one-participant-out evaluation of one setting");
  evaluate->add_option("--data", data_dir, "featurize output directory")->required();
  evaluate->add_option("--out", out_dir, "Output directory")->required();
  evaluate->add_option("--setting", setting, "base | aug | aug+per");
  evaluate->add_option("--features", features, "sensing | sensing+demo");
  evaluate->add_option("--seeds", seeds, "Comma-separated seeds (default: config)");
  add_common(evaluate, common);

  auto* report = app.add_subcommand("report", "Full grid: 3 settings x 2 feature sets + baselines");
  report->add_option("--data", data_dir, "featurize output directory")->required();
  report->add_option("--out", out_dir, "Output directory")->required();
  report->add_option("--seeds", seeds, "Comma-separated seeds (default: config)");
  add_common(report, common);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) return run_synth(spec_file, out_dir, common);
    if (*featurize) return run_featurize(cohort_dir, out_dir, common);
    if (*sequence) return run_sequence(data_dir, out_dir, common);
    if (*augment) return run_augment(data_dir, out_dir, k, aug_seed, tau, common);
    if (*train) {
      return run_train(data_dir, out_dir, setting, features, holdout, common);
    }
    const auto cfg = resolve_config(common);
    const auto cohort = load_windows(data_dir, cfg);
    const auto seed_list = parse_seeds(seeds, cfg);
    fs::create_directories(out_dir);
    if (*evaluate) {
      const RunSpec spec{parse_setting(setting), parse_feature_set(features)};
      auto folds = lopo_run(cohort, cfg, spec, seed_list);
      const auto rep = summarize_folds(setting, features, folds);
      const std::array<MetricReport, 1> reps{rep};
      write_metrics_csv(fs::path(out_dir) / "metrics.csv", reps);
      const std::array<PredictionSet, 1> sets{PredictionSet{setting, features, std::move(folds)}};
      write_predictions_csv(fs::path(out_dir) / "predictions.csv", sets);
      write_embedding(out_dir, cohort, cfg);
      print_report(rep);
      return 0;
    }
    // report
    std::vector<MetricReport> reps;
    std::vector<PredictionSet> sets;
    std::vector<FoldResult> folds;
    reps.push_back(logistic_baseline(cohort, cfg.baseline, &folds));
    sets.push_back({reps.back().setting, reps.back().features, folds});
    reps.push_back(summary_baseline(cohort, cfg.baseline, &folds));
    sets.push_back({reps.back().setting, reps.back().features, folds});
    for (auto fset : {FeatureSet::sensing, FeatureSet::fused}) {
      for (auto st : {Setting::base, Setting::augmented, Setting::personalized}) {
        auto f = lopo_run(cohort, cfg, {st, fset}, seed_list);
        reps.push_back(summarize_folds(std::string(to_string(st)), std::string(to_string(fset)), f));
        sets.push_back({reps.back().setting, reps.back().features, std::move(f)});
        print_report(reps.back());
      }
    }
    write_metrics_csv(fs::path(out_dir) / "metrics.csv", reps);
    write_predictions_csv(fs::path(out_dir) / "predictions.csv", sets);
    write_embedding(out_dir, cohort, cfg);

    // One-sided tests on per-seed participant-level metrics.
    std::ofstream tests(fs::path(out_dir) / "ttests.csv");
    tests << "features,comparison,metric,t,p,df,note\n";
    const double demo_auc = reps[0].get("participant", "auc").mean;
    const double demo_auprc = reps[0].get("participant", "auprc").mean;
    for (std::size_t f = 0; f < 2; ++f) {
      const auto& base = reps[2 + 3 * f];
      const auto& aug = reps[3 + 3 * f];
      const auto& per = reps[4 + 3 * f];
      for (const char* metric : {"auc", "auprc"}) {
        const auto emit = [&](const std::string& name, auto&& fn) {
          tests << base.features << ',' << name << ',' << metric << ',';
          try {
            const auto r = fn();
            tests << format_number(r.t) << ',' << format_number(r.p) << ',' << r.df << ",\n";
          } catch (const Error& e) {
            tests << ",,," << '"' << e.what() << "\"\n";
          }
        };
        const auto& b = base.get("participant", metric).per_seed;
        const auto& a = aug.get("participant", metric).per_seed;
        const auto& p = per.get("participant", metric).per_seed;
        const double mu = std::string(metric) == "auc" ? demo_auc : demo_auprc;
        emit("base>demographic", [&] { return one_sample_t_test_one_sided(b, mu); });
        emit("aug>base", [&] { return paired_t_test_one_sided(a, b); });
        emit("aug+per>aug", [&] { return paired_t_test_one_sided(p, a); });
      }
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
