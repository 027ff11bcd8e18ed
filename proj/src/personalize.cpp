#include "cogsense/personalize.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace cogsense {

double demographic_distance(const std::array<double, 3>& test, const std::array<double, 3>& train,
                            double clamp) {
  double acc = 0.0;
  for (std::size_t k = 0; k < 3; ++k) acc += (test[k] - train[k]) * (test[k] - train[k]);
  return std::max(std::sqrt(acc), clamp);
}

namespace {

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out(logits.size());
  if (logits.empty()) return out;
  const double hi = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - hi);
    sum += out[i];
  }
  for (auto& v : out) v /= sum;
  return out;
}

}  // namespace

std::vector<double> participant_weights(std::span<const double> distances, double total_samples) {
  if (distances.empty()) throw Error("personalization needs at least one training participant");
  std::vector<double> inv(distances.size());
  for (std::size_t j = 0; j < distances.size(); ++j) {
    if (!(distances[j] > 0.0)) throw Error("demographic distances must be positive");
    inv[j] = 1.0 / distances[j];
  }
  auto w = softmax(inv);
  for (auto& v : w) v *= total_samples;
  return w;
}

std::vector<double> batch_reweight(std::span<const double> raw_weights) {
  if (raw_weights.empty()) throw Error("cannot reweight an empty batch");
  return softmax(raw_weights);
}

PersonalizationWeights personalize(const DemographicProfile& test_profile,
                                   std::span<const ParticipantSeries> participants,
                                   std::span<const std::size_t> training_members,
                                   std::span<const std::string> sample_participants,
                                   const DemographicStats& stats,
                                   const PersonalizationConfig& config) {
  PersonalizationWeights pw;
  const auto test_z = standardize_demographics(test_profile, stats);
  std::map<std::string, std::size_t, std::less<>> slot;
  for (auto m : training_members) {
    const auto& p = participants[m];
    slot[p.id] = pw.participant_ids.size();
    pw.participant_ids.push_back(p.id);
    pw.distances.push_back(
        demographic_distance(test_z, standardize_demographics(p.demographics, stats), config.clamp));
  }
  pw.participant_weight =
      participant_weights(pw.distances, static_cast<double>(sample_participants.size()));
  // Samples inherit their participant's weight, rescaled so the weights
  // average one over the training samples (participants differ in size).
  pw.sample_weight.reserve(sample_participants.size());
  double total = 0.0;
  for (const auto& id : sample_participants) {
    auto it = slot.find(id);
    if (it == slot.end()) throw Error("sample from non-training participant " + id);
    pw.sample_weight.push_back(pw.participant_weight[it->second]);
    total += pw.sample_weight.back();
  }
  const double scale = total > 0.0 ? static_cast<double>(sample_participants.size()) / total : 0.0;
  for (auto& w : pw.sample_weight) w *= scale;
  return pw;
}

}  // namespace cogsense
