#pragma once

// Synthetic cohorts in the ingest layout. Each participant follows a fixed
// routine (home, a few places, habitual walks, typing and phone use) with
// day-to-day noise; impaired participants carry the planted effects.

#include <filesystem>
#include <string>
#include <vector>

#include "cogsense/ingest.hpp"
#include "cogsense/sequence.hpp"

namespace cogsense {

struct PlantedEffects {
  double key_hold_ms = 30.0;          // added to the character hold-time mean
  double walking_speed_factor = 0.8;  // multiplies walking speed
  double unlock_count = 20.0;         // added to the daily unlock rate
  double education_years = 2.0;       // added to education

  bool none() const {
    return key_hold_ms == 0.0 && walking_speed_factor == 1.0 && unlock_count == 0.0 &&
           education_years == 0.0;
  }
};

struct RoutineParams {
  std::size_t min_places = 2;
  std::size_t max_places = 5;
  double outings_per_day = 1.5;   // mean of the per-participant rate
  double walks_per_day = 2.5;
  double typing_sessions_per_day = 7.0;
  double calls_per_day = 1.5;
  double messages_per_day = 4.0;
  double unlocks_per_day = 40.0;
  double day_noise = 0.15;        // relative day-to-day spread of rates
};

struct CohortSpec {
  std::size_t participants = 36;
  std::size_t days = 60;
  double impaired_fraction = 12.0 / 36.0;
  std::string start_date = "2024-03-04";
  int tz_offset_minutes = -360;
  double invalid_day_rate = 0.03;  // days with too little coverage
  double travel_day_rate = 0.01;   // days spanning two timezones
  PlantedEffects effects;
  RoutineParams routine;
  std::uint64_t seed = 20240304;

  /// Throws on out-of-range fields.
  void validate() const;
};

CohortSpec load_cohort_spec(const std::filesystem::path& file);
CohortSpec cohort_spec_from_json_text(const std::string& text);
std::string cohort_spec_to_json_text(const CohortSpec& spec);

struct GeneratedParticipant {
  Manifest manifest;
  EventStreams streams;
  std::vector<Date> low_coverage_days;
  std::vector<Date> travel_days;
};

/// In-memory generation of participant `index` (deterministic per spec.seed).
GeneratedParticipant generate_participant(const CohortSpec& spec, std::size_t index);

/// Writes <out>/<pid>/{manifest.json,*.jsonl} and <out>/ledger.json with the
/// planted parameters and the record count of every stream.
void generate_cohort(const CohortSpec& spec, const std::filesystem::path& out, std::size_t jobs = 1);

/// Edge cases for the featurizer and windowing rules.
struct DegenerateFixtures {
  SensorDay empty_day;             // full coverage, no behavioural events
  SensorDay single_location_day;   // one location sample
  Participant multi_timezone;      // its single day spans two offsets
  SensorDay landscape_typing_day;  // typing only in landscape
  ParticipantSeries window_22;     // 30 consecutive dates, 22 valid
  ParticipantSeries window_23;     // 30 consecutive dates, 23 valid
};

DegenerateFixtures generate_degenerate_fixtures();

}  // namespace cogsense
