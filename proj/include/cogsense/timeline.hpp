#pragma once

// Domain types shared by every stage of the pipeline. Plain values, no I/O.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cogsense {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Epoch milliseconds, UTC.
using TimestampMs = std::int64_t;
using Date = std::chrono::sys_days;

inline constexpr TimestampMs kMsPerSecond = 1'000;
inline constexpr TimestampMs kMsPerMinute = 60'000;
inline constexpr TimestampMs kMsPerHour = 3'600'000;
inline constexpr TimestampMs kMsPerDay = 86'400'000;

inline constexpr double kEarthRadiusM = 6'371'000.0;

/// Feature values use NaN as the "missing" marker.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) { return std::isnan(v); }

Date parse_date(std::string_view text);  // YYYY-MM-DD
std::string format_date(Date d);
TimestampMs date_to_utc_ms(Date d);

struct LocalDay {
  std::string participant_id;
  Date date{};
  int tz_offset_minutes = 0;
  TimestampMs day_start = 0;  // local midnight, UTC ms
  TimestampMs day_end = 0;    // exclusive

  bool contains(TimestampMs t) const { return t >= day_start && t < day_end; }
  double length_hours() const {
    return static_cast<double>(day_end - day_start) / kMsPerHour;
  }
};

/// Local midnight of `date` at `tz_offset_minutes`, expressed in UTC ms.
TimestampMs local_midnight_utc(Date date, int tz_offset_minutes);

/// Builds the day record. The day ends at the next local midnight; when the
/// following calendar day is known with a different offset, it ends at that
/// day's start so consecutive days tile the timeline (23/25 h DST days).
LocalDay make_local_day(std::string participant_id, Date date, int tz_offset_minutes,
                        std::optional<int> next_day_offset_minutes = std::nullopt);

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;
};

struct LocationSample {
  TimestampMs t = 0;
  double lat = 0.0;
  double lon = 0.0;
  double accuracy_m = 0.0;
  std::optional<double> speed_mps;

  LatLon position() const { return {lat, lon}; }
};

/// Counters are cumulative since local midnight of the day the event falls in.
struct StepEvent {
  TimestampMs t = 0;
  std::int64_t cumulative_steps = 0;
  double cumulative_distance_m = 0.0;
};

enum class ActivityKind { walking, running, cycling, automotive };
inline constexpr std::size_t kActivityKindCount = 4;

struct ActivityInterval {
  ActivityKind kind = ActivityKind::walking;
  TimestampMs start = 0;
  TimestampMs end = 0;
};

struct MinAvgMax {
  double min = 0.0;
  double avg = 0.0;
  double max = 0.0;
};

struct GaitDailyMetrics {
  TimestampMs t = 0;
  std::optional<MinAvgMax> walking_speed;   // m/s
  std::optional<MinAvgMax> step_length;     // m
  std::optional<MinAvgMax> asymmetry;       // fraction
  std::optional<MinAvgMax> double_support;  // fraction
};

struct UnlockEvent {
  TimestampMs t = 0;
  double duration_s = 0.0;
};

struct AppUsage {
  TimestampMs t = 0;
  std::string category;
  double duration_s = 0.0;
};

enum class Orientation { portrait, landscape };
enum class KeyClass { character, del, other };

struct Keystroke {
  TimestampMs t_down = 0;
  TimestampMs t_up = 0;
  KeyClass key_class = KeyClass::character;
  std::optional<double> distance_to_center;  // key widths
};

struct TypingSession {
  TimestampMs start = 0;
  TimestampMs end = 0;
  Orientation orientation = Orientation::portrait;
  std::int64_t word_count = 0;
  std::int64_t taps = 0;
  std::int64_t deletes = 0;
  std::int64_t altered_words = 0;
  std::int64_t corrections = 0;
  std::int64_t pauses = 0;
  std::vector<Keystroke> keystrokes;
};

enum class CommKind { call, message };
enum class CommDirection { incoming, outgoing };

struct CommEvent {
  CommKind kind = CommKind::call;
  CommDirection direction = CommDirection::incoming;
  TimestampMs t = 0;
  std::optional<double> duration_s;  // calls only
  std::string contact_hash;
};

/// Interval during which the sensing app reported itself alive.
struct HeartbeatInterval {
  TimestampMs start = 0;
  TimestampMs end = 0;
};

enum class Sex { female, male };

struct DemographicProfile {
  double age = 0.0;
  Sex sex = Sex::female;
  double education = 0.0;

  /// (age, sex{female=0, male=1}, education)
  std::array<double, 3> as_vector() const {
    return {age, sex == Sex::male ? 1.0 : 0.0, education};
  }
};

std::string_view to_string(ActivityKind k);
std::string_view to_string(Orientation o);
std::string_view to_string(KeyClass k);
std::string_view to_string(CommKind k);
std::string_view to_string(CommDirection d);
std::string_view to_string(Sex s);

ActivityKind parse_activity_kind(std::string_view s);
Orientation parse_orientation(std::string_view s);
KeyClass parse_key_class(std::string_view s);
CommKind parse_comm_kind(std::string_view s);
CommDirection parse_comm_direction(std::string_view s);
Sex parse_sex(std::string_view s);

/// Great-circle distance on a sphere of radius 6,371 km.
double haversine_m(LatLon a, LatLon b);

/// Hours since local midnight of `day`. Throws if t is outside the day.
double local_clock_fraction(TimestampMs t, const LocalDay& day);

}  // namespace cogsense
