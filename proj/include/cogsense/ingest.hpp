#pragma once

// Cohort files on disk -> per-participant SensorDays.
//
// Layout:  <cohort>/<pid>/manifest.json
//          <cohort>/<pid>/{location,steps,activity,gait,usage,typing,comm,heartbeat}.jsonl
//
// Every stream file is optional; a missing file is an empty stream. The
// record schemas are documented in docs/data_format.md.

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "cogsense/timeline.hpp"

namespace cogsense {

inline constexpr std::array<std::string_view, 8> kStreamNames{
    "location", "steps", "activity", "gait", "usage", "typing", "comm", "heartbeat"};

/// Event collections for one day (or, unpartitioned, for a whole participant).
struct EventStreams {
  std::vector<LocationSample> location;
  std::vector<StepEvent> steps;
  std::vector<ActivityInterval> activity;
  std::vector<GaitDailyMetrics> gait;
  std::vector<UnlockEvent> unlocks;
  std::vector<AppUsage> app_usage;
  std::vector<TypingSession> typing;
  std::vector<CommEvent> comm;
  std::vector<HeartbeatInterval> heartbeat;

  /// Per-stream record counts in kStreamNames order (usage = unlocks + app records).
  std::array<std::size_t, 8> counts() const;
  bool empty() const;
};

struct SensorDay {
  LocalDay day;
  EventStreams streams;
  double coverage_hours = 0.0;
  bool multi_timezone = false;
};

struct ManifestDay {
  Date date{};
  int tz_offset_minutes = 0;
};

struct Manifest {
  std::string participant_id;
  int label = 0;
  DemographicProfile demographics;
  /// One entry per calendar date; a date listed with two different offsets
  /// marks a multi-timezone day.
  std::vector<ManifestDay> days;
};

struct Participant {
  std::string id;
  int label = 0;
  DemographicProfile demographics;
  std::vector<SensorDay> days;  // sorted by date, one per distinct date
};

struct CoverageConfig {
  double window_start_hour = 6.0;
  double window_end_hour = 24.0;
  double min_valid_hours = 14.0;
};

Manifest read_manifest(const std::filesystem::path& file);
void write_manifest(const std::filesystem::path& file, const Manifest& manifest);

/// Reads all stream files of one participant directory (unpartitioned).
EventStreams read_streams(const std::filesystem::path& participant_dir);
void write_streams(const std::filesystem::path& participant_dir, const EventStreams& streams);

/// Assigns every record to the LocalDay containing its timestamp (interval
/// records by start). Records outside every listed day are an error.
std::vector<SensorDay> partition_days(const Manifest& manifest, EventStreams streams,
                                      const CoverageConfig& coverage = {});

/// Concatenates day streams back into one participant stream.
EventStreams merge_days(const std::vector<SensorDay>& days);

Participant load_participant(const std::filesystem::path& participant_dir,
                             const CoverageConfig& coverage = {});

/// Loads every participant directory under `cohort_dir`, sorted by id.
std::vector<Participant> load_cohort(const std::filesystem::path& cohort_dir,
                                     const CoverageConfig& coverage = {});

/// Hours of the [06:00, 24:00) local window in which any stream reported
/// presence, at one-minute resolution.
double compute_coverage(const SensorDay& day, const CoverageConfig& config = {});

bool is_valid_day(const SensorDay& day, const CoverageConfig& config = {});

}  // namespace cogsense
