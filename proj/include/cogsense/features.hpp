#pragma once

// Daily behavioural features. The registry fixes the name and position of
// every feature; all downstream stages index vectors through it.

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cogsense/distribution.hpp"
#include "cogsense/ingest.hpp"
#include "cogsense/location.hpp"

namespace cogsense {

enum class FeatureCategory { activity, pedometer_gait, location, usage, typing, communication, meta };

std::string_view to_string(FeatureCategory c);

struct FeatureSpec {
  std::string name;
  FeatureCategory category;
  std::string unit;
};

class FeatureRegistry {
 public:
  /// The canonical registry: sensing features followed by the coverage meta feature.
  static const FeatureRegistry& standard();

  explicit FeatureRegistry(std::vector<FeatureSpec> specs);

  std::size_t size() const { return specs_.size(); }
  std::size_t sensing_count() const;
  const FeatureSpec& operator[](std::size_t i) const { return specs_[i]; }
  const std::vector<FeatureSpec>& specs() const { return specs_; }
  std::size_t index_of(std::string_view name) const;  // throws if absent
  bool contains(std::string_view name) const;
  /// Indices of the non-meta features, in order.
  std::vector<std::size_t> sensing_indices() const;

  /// CSV with header name,category,unit,index
  void write_csv(const std::filesystem::path& file) const;

 private:
  std::vector<FeatureSpec> specs_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

inline constexpr std::array<std::string_view, 6> kUsageTypes{
    "productivity", "information", "social", "life", "health", "other"};

/// App category -> one of kUsageTypes.
class UsageCategoryMap {
 public:
  /// The 29 device-usage categories with a default consolidation.
  static UsageCategoryMap defaults();
  /// CSV with header category,type
  static UsageCategoryMap from_csv(const std::filesystem::path& file);

  void set(std::string category, std::string_view type);
  std::size_t type_index(std::string_view category) const;  // throws naming unmapped category
  std::size_t size() const { return map_.size(); }
  const std::map<std::string, std::size_t, std::less<>>& entries() const { return map_; }
  void write_csv(const std::filesystem::path& file) const;

 private:
  std::map<std::string, std::size_t, std::less<>> map_;
};

struct FeatureConfig {
  LocationConfig location;
  double walk_gap_s = 2.5;
  double min_walk_duration_s = 10.0;
  std::int64_t min_walk_steps_exclusive = 10;
  CoverageConfig coverage;
  UsageCategoryMap usage_map = UsageCategoryMap::defaults();
};

struct WalkingPeriod {
  TimestampMs start = 0;
  TimestampMs end = 0;
  double steps = 0.0;
  double distance_m = 0.0;
  double cadence = 0.0;      // steps / s
  double pace = kMissing;    // s / m, missing when distance is 0

  double duration_s() const { return static_cast<double>(end - start) / kMsPerSecond; }
};

std::array<double, kActivityKindCount> activity_features(const SensorDay& day);

/// Runs of step events with gaps <= walk_gap_s, kept when they last at least
/// the minimum duration and contain more than the minimum step count.
std::vector<WalkingPeriod> detect_walking_periods(std::span<const StepEvent> steps,
                                                  const FeatureConfig& config = {});

struct PedometerFeatures {
  double total_steps = 0.0;
  double total_distance_m = 0.0;
  double first_step_hour = kMissing;
  DistributionStats period_steps, period_distance, period_cadence, period_pace;
};

PedometerFeatures pedometer_features(const SensorDay& day, const FeatureConfig& config = {});

/// min/avg/max of walking speed, step length, asymmetry, double support.
std::array<double, 12> gait_features(const SensorDay& day);

struct UsageFeatures {
  double unlock_count = 0.0;
  double unlock_duration_s = 0.0;
  std::array<double, kUsageTypes.size()> shares;  // NaN when no app usage
};

UsageFeatures usage_features(const SensorDay& day, const UsageCategoryMap& map);

struct TypingFeatures {
  double duration_s = 0.0;
  double sessions = 0.0;
  double words = 0.0;
  // per-word rates of taps, deletes, altered words, corrections, pauses
  std::array<double, 5> rates{kMissing, kMissing, kMissing, kMissing, kMissing};
  DistributionStats hold_ms, char_transition_ms, delete_transition_ms, center_distance;
};

TypingFeatures typing_features(const SensorDay& day);

struct CommFeatures {
  double calls_in = 0.0;
  double calls_out = 0.0;
  double messages_in = 0.0;
  double messages_out = 0.0;
  double call_duration_s = 0.0;
  double unique_contacts = 0.0;
};

CommFeatures comm_features(const SensorDay& day);

/// Full daily vector in registry order. Throws for an invalid day.
std::vector<double> featurize_day(const SensorDay& day, const FeatureConfig& config = {});

}  // namespace cogsense
