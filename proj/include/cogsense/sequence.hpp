#pragma once

// 30-day sliding windows over featurized days, fold-local standardization
// and the matrices fed to the sequence model.

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "cogsense/timeline.hpp"

namespace cogsense {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// One featurized valid day.
struct DayRecord {
  Date date{};
  std::vector<double> values;  // registry order, NaN = missing
};

/// A participant's valid days, sorted by date. Dates not listed are invalid.
struct ParticipantSeries {
  std::string id;
  int label = 0;
  DemographicProfile demographics;
  std::vector<DayRecord> days;
};

struct WindowConfig {
  std::size_t length_days = 30;
  std::size_t min_valid_days = 23;
  std::size_t min_windows_per_participant = 5;
};

/// Calendar-anchored window; rows index into ParticipantSeries::days, -1 for
/// an invalid or absent date.
struct RawWindow {
  Date start{};
  std::vector<int> rows;

  std::size_t valid_count() const;
};

std::vector<RawWindow> build_windows(const ParticipantSeries& series, const WindowConfig& config = {});

struct Cohort {
  std::vector<ParticipantSeries> participants;
  std::vector<std::vector<RawWindow>> windows;  // parallel to participants

  std::size_t window_count() const;
  std::size_t index_of(std::string_view participant_id) const;
};

/// Builds windows and drops participants with too few of them.
Cohort retain_participants(std::vector<ParticipantSeries> series, const WindowConfig& config = {});

struct StandardizationStats {
  std::vector<double> mean;
  std::vector<double> stddev;  // population
  std::vector<bool> constant;  // stddev == 0 (or no observations)
  std::vector<std::string> contributors;  // participant ids the fit used

  std::size_t size() const { return mean.size(); }
};

/// Per-feature mean/std over every valid day of the given participants;
/// missing values are skipped. Throws on an empty set.
StandardizationStats fit_standardization(std::span<const ParticipantSeries> participants,
                                         std::span<const std::size_t> members);

/// (v - mean) / std, with missing values and constant features mapped to 0.
Eigen::RowVectorXd standardize_day(std::span<const double> values, const StandardizationStats& stats);

/// Inverse of standardize_day on non-constant features.
std::vector<double> destandardize_day(const Eigen::RowVectorXd& z, const StandardizationStats& stats);

struct SequenceSample {
  std::string participant_id;
  Date window_start{};
  Matrix x;  // length_days x width, finite
  std::vector<bool> valid_mask;
  std::vector<int> row_sources;  // day index per row, -1 for invalid rows
  int label = 0;
  bool is_synthetic = false;
};

SequenceSample standardize_impute(const RawWindow& window, const ParticipantSeries& series,
                                  const StandardizationStats& stats);

/// Standardized valid-day matrix of a participant (rows follow series.days).
Matrix standardize_days(const ParticipantSeries& series, const StandardizationStats& stats);

struct DemographicStats {
  std::array<double, 3> mean{};
  std::array<double, 3> stddev{};
  std::vector<std::string> contributors;
};

DemographicStats fit_demographics(std::span<const ParticipantSeries> participants,
                                  std::span<const std::size_t> members);

std::array<double, 3> standardize_demographics(const DemographicProfile& profile,
                                               const DemographicStats& stats);

/// Appends the standardized (age, sex, education) triple to every row.
SequenceSample fuse_demographics(const SequenceSample& sample, const DemographicProfile& profile,
                                 const DemographicStats& stats);

/// mean, std, min, max of each feature over the window's valid days (4F
/// values, grouped by statistic). Features never observed are NaN.
std::vector<double> window_summary_stats(const RawWindow& window, const ParticipantSeries& series);

}  // namespace cogsense
