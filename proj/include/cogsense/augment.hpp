#pragma once

// Routine-aware augmentation: synthetic windows built by swapping each valid
// day for one of the participant's own behaviourally closest days.

#include <span>
#include <vector>

#include "cogsense/rng.hpp"
#include "cogsense/sequence.hpp"

namespace cogsense {

struct AugmentConfig {
  std::size_t synthetic_per_sample = 5;
  std::size_t neighbors = 5;
  double tau_percentile = 10.0;
};

struct ReplacementIndex {
  Matrix distances;  // n x n, symmetric, zero diagonal
  double tau = kMissing;  // NaN when fewer than two days
  std::vector<std::vector<int>> candidates;  // per day, positions sorted by distance

  std::size_t size() const { return candidates.size(); }
};

/// Pairwise Euclidean distances between the rows of `vectors`.
Matrix pairwise_distances(const Matrix& vectors);

/// Candidates of day i: its `neighbors` nearest other days (ties by index),
/// keeping only those strictly closer than tau, the given percentile of the
/// upper-triangle distances.
ReplacementIndex build_replacement_index(const Matrix& vectors, const AugmentConfig& config = {});

/// A participant's replacement pool: standardized rows of every training-period
/// valid day, plus the index over their sensing columns.
struct DayPool {
  std::string participant_id;
  Matrix rows;  // one row per ParticipantSeries::days entry
  ReplacementIndex index;
};

/// `sensing_columns` selects the features used for distances.
DayPool build_day_pool(const ParticipantSeries& series, const StandardizationStats& stats,
                       std::span<const std::size_t> sensing_columns,
                       const AugmentConfig& config = {});

/// Replaces each valid row whose day has candidates by a uniform draw from
/// them. Rows without candidates and invalid rows are kept.
SequenceSample synthesize_sequence(const SequenceSample& sample, const DayPool& pool, Rng& rng);

/// Originals followed, per original, by `k` synthetic samples. The stream for
/// replica r of sample i is seeded from (seed, participant, window start, r).
std::vector<SequenceSample> augment_training_set(const std::vector<SequenceSample>& samples,
                                                 std::span<const DayPool> pools, std::size_t k,
                                                 std::uint64_t seed);

}  // namespace cogsense
