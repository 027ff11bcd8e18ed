#pragma once

// Demographic instance weighting: training samples from participants whose
// (age, sex, education) resemble the held-out participant weigh more.

#include <span>
#include <vector>

#include "cogsense/sequence.hpp"

namespace cogsense {

struct PersonalizationConfig {
  bool enabled = true;
  bool batch_softmax = true;
  double clamp = 1e-6;
};

/// Euclidean distance between standardized demographic triples, clamped below.
double demographic_distance(const std::array<double, 3>& test, const std::array<double, 3>& train,
                            double clamp = 1e-6);

/// w_j = N * exp(1/S_j) / sum_k exp(1/S_k), evaluated in log-sum-exp form.
std::vector<double> participant_weights(std::span<const double> distances, double total_samples);

/// Softmax over the raw weights of one batch.
std::vector<double> batch_reweight(std::span<const double> raw_weights);

struct PersonalizationWeights {
  std::vector<std::string> participant_ids;  // training participants
  std::vector<double> distances;
  std::vector<double> participant_weight;
  std::vector<double> sample_weight;  // per training sample; proportional to its participant's w, mean 1
};

/// Weights for the training samples (given as their participant ids) relative
/// to the held-out profile. Demographics are standardized with `stats`, which
/// must come from the training participants.
PersonalizationWeights personalize(const DemographicProfile& test_profile,
                                   std::span<const ParticipantSeries> participants,
                                   std::span<const std::size_t> training_members,
                                   std::span<const std::string> sample_participants,
                                   const DemographicStats& stats,
                                   const PersonalizationConfig& config = {});

}  // namespace cogsense
