#pragma once

// One structured configuration for every pipeline stage. Defaults reproduce
// the reference protocol; a JSON file overrides any subset of keys and any
// key not listed here is rejected.

#include <filesystem>
#include <string>
#include <vector>

#include "cogsense/augment.hpp"
#include "cogsense/features.hpp"
#include "cogsense/logistic.hpp"
#include "cogsense/nn.hpp"
#include "cogsense/personalize.hpp"
#include "cogsense/sequence.hpp"

namespace cogsense {

struct EvaluateConfig {
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  double pca_variance = 0.95;
};

struct PipelineConfig {
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  FeatureConfig features;
  std::string usage_category_map;  // CSV path; empty = built-in table
  WindowConfig window;
  AugmentConfig augment;
  PersonalizationConfig personalization;
  TrainConfig model;  // model.epochs is the base-setting epoch count
  std::size_t epochs_augmented = 5;
  LogisticConfig baseline;
  EvaluateConfig evaluate;
};

PipelineConfig config_from_json_text(const std::string& text);
PipelineConfig load_config(const std::filesystem::path& file);
std::string config_to_json_text(const PipelineConfig& config);

/// Applies COGSENSE_SEED when set.
void apply_environment(PipelineConfig& config);

}  // namespace cogsense
