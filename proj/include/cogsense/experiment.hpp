#pragma once

// Leave-one-participant-out evaluation of the sequence model and the two
// linear baselines, plus the metric tables and routine embedding exports.

#include <filesystem>
#include <functional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "cogsense/config.hpp"
#include "cogsense/pca.hpp"
#include "cogsense/sequence.hpp"

namespace cogsense {

enum class Setting { base, augmented, personalized };  // base, aug, aug+per
enum class FeatureSet { sensing, fused };              // sensing, sensing+demo

std::string_view to_string(Setting s);
std::string_view to_string(FeatureSet f);
Setting parse_setting(std::string_view s);
FeatureSet parse_feature_set(std::string_view s);

struct RunSpec {
  Setting setting = Setting::base;
  FeatureSet features = FeatureSet::sensing;
};

/// Everything a fold fitted, reduced to the participant ids that fed it.
struct FoldAudit {
  std::string held_out;
  std::uint64_t seed = 0;
  std::vector<std::string> standardization_contributors;
  std::vector<std::string> demographic_contributors;
  std::vector<std::string> pool_owners;  // one per replacement pool
  std::vector<std::string> weight_participants;
  double weight_sum = 0.0;
  std::size_t training_samples = 0;
  std::vector<std::string> training_sample_participants;  // distinct, sorted
  std::set<std::string> batch_participants;
  std::size_t optimizer_steps = 0;
  bool single_class = false;

  /// True when the held-out id appears in none of the lists above.
  bool clean() const;
};

/// Invoked once per fold; calls are serialized.
using FoldObserver = std::function<void(const FoldAudit&)>;

struct FoldResult {
  std::string participant_id;
  int label = 0;
  std::uint64_t seed = 0;
  std::vector<Date> window_starts;
  std::vector<double> sequence_probabilities;
  double participant_probability = 0.0;  // mean of sequence_probabilities
  std::size_t optimizer_steps = 0;
};

/// Training configuration a fold uses: epoch count follows the setting.
TrainConfig fold_train_config(const PipelineConfig& config, Setting setting, std::uint64_t seed,
                              std::string_view held_out);

struct FoldModel {
  TrainResult trained;
  StandardizationStats stats;
  DemographicStats demographics;
};

/// Fits standardization, replacement pools, personalization weights (relative
/// to `target`) and the model on `members` only. `fold_key` names the fold in
/// seeds and messages.
FoldModel fit_fold_model(const Cohort& cohort, std::span<const std::size_t> members,
                         const DemographicProfile& target, std::string_view fold_key,
                         const PipelineConfig& config, RunSpec spec, std::uint64_t seed,
                         FoldAudit* audit = nullptr);

std::vector<double> score_windows(const FoldModel& model, const ParticipantSeries& series,
                                  std::span<const RawWindow> windows, FeatureSet features);

FoldResult run_fold(const Cohort& cohort, std::size_t held_out, const PipelineConfig& config,
                    RunSpec spec, std::uint64_t seed, FoldAudit* audit = nullptr);

/// Folds ordered by seed, then by cohort order. Runs on config.jobs threads.
std::vector<FoldResult> lopo_run(const Cohort& cohort, const PipelineConfig& config, RunSpec spec,
                                 std::span<const std::uint64_t> seeds,
                                 const FoldObserver& observer = {});

struct MetricSummary {
  std::string level;   // sequence | participant
  std::string metric;  // auc | auprc
  std::vector<double> per_seed;
  double mean = 0.0;
  double sd = 0.0;  // sample SD, 0 for a single seed
};

struct MetricReport {
  std::string setting;
  std::string features;
  std::vector<MetricSummary> rows;

  const MetricSummary& get(std::string_view level, std::string_view metric) const;
};

MetricReport summarize_folds(std::string setting, std::string features,
                             std::span<const FoldResult> folds);

/// Logistic regression on standardized (age, sex, education), one row per
/// participant, refitted per fold. Participant level only.
MetricReport logistic_baseline(const Cohort& cohort, const LogisticConfig& config,
                               std::vector<FoldResult>* folds = nullptr);

/// Logistic regression on the 4F window summary statistics of the sensing
/// features, standardized per fold.
MetricReport summary_baseline(const Cohort& cohort, const LogisticConfig& config,
                              std::vector<FoldResult>* folds = nullptr,
                              const FoldObserver& observer = {});

struct PredictionSet {
  std::string setting;
  std::string features;
  std::vector<FoldResult> folds;
};

/// setting,features,level,metric,mean,sd,n
void write_metrics_csv(const std::filesystem::path& file, std::span<const MetricReport> reports);
/// setting,features,seed,participant_id,label,level,window_start,probability
void write_predictions_csv(const std::filesystem::path& file, std::span<const PredictionSet> sets);

struct RoutineEmbedding {
  PcaResult pca;
  std::vector<std::string> participant_ids;  // per day
  std::vector<Date> dates;
  std::vector<int> labels;
};

/// PCA of every valid day's sensing features, standardized over the cohort
/// and zero-imputed.
RoutineEmbedding routine_embedding(const Cohort& cohort, double variance_target);

/// participant_id,date,label,pc1..pck
void write_pca_embedding_csv(const std::filesystem::path& file, const RoutineEmbedding& embedding);

/// Cohen's d of between-participant over within-participant day distances
/// in the retained PCA space.
double routine_separation(const RoutineEmbedding& embedding);

}  // namespace cogsense
