#pragma once

// File artifacts exchanged between pipeline stages.
//
//   features.csv      participant_id,date,<registry names...>; empty cell = missing
//   participants.csv  participant_id,label,age,sex,education
//   registry.csv      name,category,unit,index
//   sequences.csv     sample_index,participant_id,label,window_start,valid_days,mask
//   standardization.csv  feature,mean,std,constant

#include <filesystem>
#include <vector>

#include "cogsense/features.hpp"
#include "cogsense/ingest.hpp"
#include "cogsense/sequence.hpp"

namespace cogsense {

/// Featurizes the valid days of each participant (days run in parallel).
std::vector<ParticipantSeries> featurize_cohort(const std::vector<Participant>& participants,
                                                const FeatureConfig& config = {},
                                                std::size_t jobs = 1);

void write_feature_table(const std::filesystem::path& dir, const std::vector<ParticipantSeries>& series,
                         const FeatureRegistry& registry = FeatureRegistry::standard());

/// Reads features.csv and participants.csv from `dir`. The header must match
/// the registry exactly.
std::vector<ParticipantSeries> read_feature_table(
    const std::filesystem::path& dir, const FeatureRegistry& registry = FeatureRegistry::standard());

void write_sequence_index(const std::filesystem::path& file, const Cohort& cohort);
void write_standardization(const std::filesystem::path& file, const StandardizationStats& stats,
                           const FeatureRegistry& registry = FeatureRegistry::standard());

/// Shortest round-trip decimal form; NaN prints as an empty string.
std::string format_number(double v);

}  // namespace cogsense
