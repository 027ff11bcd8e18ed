#include "cogsense/timeline.hpp"

#include <charconv>
#include <cstdio>
#include <numbers>

namespace cogsense {

namespace {

int parse_int(std::string_view s, std::string_view whole) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error("invalid date '" + std::string(whole) + "'");
  }
  return v;
}

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view s, const std::array<std::string_view, N>& names,
                std::string_view what) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == s) return static_cast<Enum>(i);
  }
  throw Error("unknown " + std::string(what) + " '" + std::string(s) + "'");
}

constexpr std::array<std::string_view, 4> kActivityNames{"walking", "running", "cycling",
                                                         "automotive"};
constexpr std::array<std::string_view, 2> kOrientationNames{"portrait", "landscape"};
constexpr std::array<std::string_view, 3> kKeyClassNames{"character", "delete", "other"};
constexpr std::array<std::string_view, 2> kCommKindNames{"call", "message"};
constexpr std::array<std::string_view, 2> kDirectionNames{"incoming", "outgoing"};
constexpr std::array<std::string_view, 2> kSexNames{"female", "male"};

}  // namespace

Date parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw Error("invalid date '" + std::string(text) + "'");
  }
  const int y = parse_int(text.substr(0, 4), text);
  const int m = parse_int(text.substr(5, 2), text);
  const int d = parse_int(text.substr(8, 2), text);
  const std::chrono::year_month_day ymd{std::chrono::year{y},
                                        std::chrono::month{static_cast<unsigned>(m)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw Error("invalid date '" + std::string(text) + "'");
  return Date{ymd};
}

std::string format_date(Date d) {
  const std::chrono::year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

TimestampMs date_to_utc_ms(Date d) {
  return static_cast<TimestampMs>(d.time_since_epoch().count()) * kMsPerDay;
}

TimestampMs local_midnight_utc(Date date, int tz_offset_minutes) {
  return date_to_utc_ms(date) - static_cast<TimestampMs>(tz_offset_minutes) * kMsPerMinute;
}

LocalDay make_local_day(std::string participant_id, Date date, int tz_offset_minutes,
                        std::optional<int> next_day_offset_minutes) {
  LocalDay day;
  day.participant_id = std::move(participant_id);
  day.date = date;
  day.tz_offset_minutes = tz_offset_minutes;
  day.day_start = local_midnight_utc(date, tz_offset_minutes);
  day.day_end = local_midnight_utc(date + std::chrono::days{1},
                                   next_day_offset_minutes.value_or(tz_offset_minutes));
  if (day.day_end <= day.day_start) {
    throw Error("day " + format_date(date) + " has non-positive length");
  }
  return day;
}

std::string_view to_string(ActivityKind k) { return kActivityNames[static_cast<int>(k)]; }
std::string_view to_string(Orientation o) { return kOrientationNames[static_cast<int>(o)]; }
std::string_view to_string(KeyClass k) { return kKeyClassNames[static_cast<int>(k)]; }
std::string_view to_string(CommKind k) { return kCommKindNames[static_cast<int>(k)]; }
std::string_view to_string(CommDirection d) { return kDirectionNames[static_cast<int>(d)]; }
std::string_view to_string(Sex s) { return kSexNames[static_cast<int>(s)]; }

ActivityKind parse_activity_kind(std::string_view s) {
  return parse_enum<ActivityKind>(s, kActivityNames, "activity kind");
}
Orientation parse_orientation(std::string_view s) {
  return parse_enum<Orientation>(s, kOrientationNames, "orientation");
}
KeyClass parse_key_class(std::string_view s) {
  return parse_enum<KeyClass>(s, kKeyClassNames, "key class");
}
CommKind parse_comm_kind(std::string_view s) {
  return parse_enum<CommKind>(s, kCommKindNames, "communication kind");
}
CommDirection parse_comm_direction(std::string_view s) {
  return parse_enum<CommDirection>(s, kDirectionNames, "direction");
}
Sex parse_sex(std::string_view s) { return parse_enum<Sex>(s, kSexNames, "sex"); }

double haversine_m(LatLon a, LatLon b) {
  constexpr double kDeg = std::numbers::pi / 180.0;
  const double phi1 = a.lat * kDeg;
  const double phi2 = b.lat * kDeg;
  const double dphi = (b.lat - a.lat) * kDeg;
  const double dlambda = (b.lon - a.lon) * kDeg;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  h = std::min(1.0, std::max(0.0, h));
  return 2.0 * kEarthRadiusM * std::asin(std::sqrt(h));
}

double local_clock_fraction(TimestampMs t, const LocalDay& day) {
  if (!day.contains(t)) {
    throw Error("timestamp " + std::to_string(t) + " outside day " + format_date(day.date));
  }
  return static_cast<double>(t - day.day_start) / kMsPerHour;
}

}  // namespace cogsense
