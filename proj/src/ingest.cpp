#include "cogsense/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <tuple>

#include <json.hpp>

namespace cogsense {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void fail_at(const fs::path& file, std::size_t line, const std::string& what) {
  throw Error(file.string() + ":" + std::to_string(line) + ": " + what);
}

std::optional<double> optional_number(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<double>();
}

std::optional<MinAvgMax> parse_min_avg_max(const json& j, const char* key, bool fraction) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  MinAvgMax m{it->at("min").get<double>(), it->at("avg").get<double>(),
              it->at("max").get<double>()};
  if (!(m.min <= m.avg && m.avg <= m.max)) {
    throw Error(std::string(key) + " violates min <= avg <= max");
  }
  if (fraction && (m.min < 0.0 || m.max > 1.0)) {
    throw Error(std::string(key) + " fraction outside [0, 1]");
  }
  return m;
}

json min_avg_max_json(const std::optional<MinAvgMax>& m) {
  if (!m) return nullptr;
  return json{{"min", m->min}, {"avg", m->avg}, {"max", m->max}};
}

json optional_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

template <typename Fn>
void for_each_record(const fs::path& file, Fn&& fn) {
  std::ifstream in(file);
  if (!in) return;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      fn(json::parse(line));
    } catch (const json::exception& e) {
      fail_at(file, line_no, std::string("malformed record: ") + e.what());
    } catch (const Error& e) {
      fail_at(file, line_no, e.what());
    }
  }
}

template <typename T, typename ToJson>
void write_records(const fs::path& file, const std::vector<T>& records, ToJson&& to_json) {
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file.string());
  for (const auto& r : records) out << to_json(r).dump() << '\n';
}

// Full-key orderings keep partitioning independent of input record order.
bool location_less(const LocationSample& a, const LocationSample& b) {
  return std::tie(a.t, a.lat, a.lon, a.accuracy_m, a.speed_mps) <
         std::tie(b.t, b.lat, b.lon, b.accuracy_m, b.speed_mps);
}
bool steps_less(const StepEvent& a, const StepEvent& b) {
  return std::tie(a.t, a.cumulative_steps, a.cumulative_distance_m) <
         std::tie(b.t, b.cumulative_steps, b.cumulative_distance_m);
}
bool activity_less(const ActivityInterval& a, const ActivityInterval& b) {
  return std::tie(a.start, a.end, a.kind) < std::tie(b.start, b.end, b.kind);
}
bool unlock_less(const UnlockEvent& a, const UnlockEvent& b) {
  return std::tie(a.t, a.duration_s) < std::tie(b.t, b.duration_s);
}
bool app_less(const AppUsage& a, const AppUsage& b) {
  return std::tie(a.t, a.category, a.duration_s) < std::tie(b.t, b.category, b.duration_s);
}
bool typing_less(const TypingSession& a, const TypingSession& b) {
  return std::tie(a.start, a.end, a.orientation, a.word_count, a.taps, a.deletes) <
         std::tie(b.start, b.end, b.orientation, b.word_count, b.taps, b.deletes);
}
bool comm_less(const CommEvent& a, const CommEvent& b) {
  return std::tie(a.t, a.kind, a.direction, a.contact_hash, a.duration_s) <
         std::tie(b.t, b.kind, b.direction, b.contact_hash, b.duration_s);
}
bool heartbeat_less(const HeartbeatInterval& a, const HeartbeatInterval& b) {
  return std::tie(a.start, a.end) < std::tie(b.start, b.end);
}
bool gait_less(const GaitDailyMetrics& a, const GaitDailyMetrics& b) { return a.t < b.t; }

}  // namespace

std::array<std::size_t, 8> EventStreams::counts() const {
  return {location.size(), steps.size(),  activity.size(), gait.size(),
          unlocks.size() + app_usage.size(), typing.size(), comm.size(), heartbeat.size()};
}

bool EventStreams::empty() const {
  const auto c = counts();
  return std::all_of(c.begin(), c.end(), [](std::size_t n) { return n == 0; });
}

Manifest read_manifest(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw Error("missing manifest " + file.string());
  Manifest m;
  try {
    const json j = json::parse(in);
    m.participant_id = j.at("participant_id").get<std::string>();
    m.label = j.at("label").get<int>();
    if (m.label != 0 && m.label != 1) throw Error("label must be 0 or 1");
    const json& d = j.at("demographics");
    m.demographics.age = d.at("age").get<double>();
    m.demographics.sex = parse_sex(d.at("sex").get<std::string>());
    m.demographics.education = d.at("education").get<double>();
    if (!(m.demographics.age > 0.0)) throw Error("age must be positive");
    if (m.demographics.education < 0.0) throw Error("education must be non-negative");
    for (const json& day : j.at("days")) {
      m.days.push_back({parse_date(day.at("date").get<std::string>()),
                        day.at("tz_offset_minutes").get<int>()});
    }
  } catch (const json::exception& e) {
    throw Error(file.string() + ": malformed manifest: " + e.what());
  } catch (const Error& e) {
    throw Error(file.string() + ": " + e.what());
  }
  return m;
}

void write_manifest(const fs::path& file, const Manifest& m) {
  json days = json::array();
  for (const auto& d : m.days) {
    days.push_back({{"date", format_date(d.date)}, {"tz_offset_minutes", d.tz_offset_minutes}});
  }
  const json j{{"participant_id", m.participant_id},
               {"label", m.label},
               {"demographics",
                {{"age", m.demographics.age},
                 {"sex", to_string(m.demographics.sex)},
                 {"education", m.demographics.education}}},
               {"days", days}};
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file.string());
  out << j.dump(2) << '\n';
}

EventStreams read_streams(const fs::path& dir) {
  EventStreams s;
  for_each_record(dir / "location.jsonl", [&](const json& j) {
    LocationSample x;
    x.t = j.at("t").get<TimestampMs>();
    x.lat = j.at("lat").get<double>();
    x.lon = j.at("lon").get<double>();
    x.accuracy_m = j.at("accuracy_m").get<double>();
    x.speed_mps = optional_number(j, "speed_mps");
    if (x.lat < -90.0 || x.lat > 90.0 || x.lon < -180.0 || x.lon > 180.0) {
      throw Error("coordinates out of range");
    }
    if (x.accuracy_m < 0.0) throw Error("negative accuracy");
    s.location.push_back(x);
  });
  for_each_record(dir / "steps.jsonl", [&](const json& j) {
    s.steps.push_back({j.at("t").get<TimestampMs>(), j.at("cumulative_steps").get<std::int64_t>(),
                       j.at("cumulative_distance_m").get<double>()});
  });
  for_each_record(dir / "activity.jsonl", [&](const json& j) {
    ActivityInterval a{parse_activity_kind(j.at("kind").get<std::string>()),
                       j.at("start").get<TimestampMs>(), j.at("end").get<TimestampMs>()};
    if (a.end <= a.start) throw Error("activity interval must have end > start");
    s.activity.push_back(a);
  });
  for_each_record(dir / "gait.jsonl", [&](const json& j) {
    GaitDailyMetrics g;
    g.t = j.at("t").get<TimestampMs>();
    g.walking_speed = parse_min_avg_max(j, "walking_speed", false);
    g.step_length = parse_min_avg_max(j, "step_length", false);
    g.asymmetry = parse_min_avg_max(j, "asymmetry", true);
    g.double_support = parse_min_avg_max(j, "double_support", true);
    s.gait.push_back(g);
  });
  for_each_record(dir / "usage.jsonl", [&](const json& j) {
    const auto type = j.at("type").get<std::string>();
    const double duration = j.at("duration_s").get<double>();
    if (duration < 0.0) throw Error("negative duration");
    if (type == "unlock") {
      s.unlocks.push_back({j.at("t").get<TimestampMs>(), duration});
    } else if (type == "app") {
      s.app_usage.push_back(
          {j.at("t").get<TimestampMs>(), j.at("category").get<std::string>(), duration});
    } else {
      throw Error("unknown usage record type '" + type + "'");
    }
  });
  for_each_record(dir / "typing.jsonl", [&](const json& j) {
    TypingSession t;
    t.start = j.at("start").get<TimestampMs>();
    t.end = j.at("end").get<TimestampMs>();
    t.orientation = parse_orientation(j.at("orientation").get<std::string>());
    t.word_count = j.at("word_count").get<std::int64_t>();
    t.taps = j.at("taps").get<std::int64_t>();
    t.deletes = j.at("deletes").get<std::int64_t>();
    t.altered_words = j.at("altered_words").get<std::int64_t>();
    t.corrections = j.at("corrections").get<std::int64_t>();
    t.pauses = j.at("pauses").get<std::int64_t>();
    if (t.end < t.start) throw Error("typing session ends before it starts");
    if (t.word_count < 0 || t.taps < 0 || t.deletes < 0 || t.altered_words < 0 ||
        t.corrections < 0 || t.pauses < 0) {
      throw Error("negative typing count");
    }
    for (const json& k : j.at("keystrokes")) {
      Keystroke ks{k.at("t_down").get<TimestampMs>(), k.at("t_up").get<TimestampMs>(),
                   parse_key_class(k.at("key").get<std::string>()),
                   optional_number(k, "distance_to_center")};
      if (ks.t_up < ks.t_down) throw Error("keystroke released before pressed");
      if (ks.t_down < t.start || ks.t_up > t.end) throw Error("keystroke outside its session");
      if (ks.distance_to_center && *ks.distance_to_center < 0.0) {
        throw Error("negative distance to key center");
      }
      t.keystrokes.push_back(ks);
    }
    s.typing.push_back(std::move(t));
  });
  for_each_record(dir / "comm.jsonl", [&](const json& j) {
    CommEvent c;
    c.kind = parse_comm_kind(j.at("kind").get<std::string>());
    c.direction = parse_comm_direction(j.at("direction").get<std::string>());
    c.t = j.at("t").get<TimestampMs>();
    c.duration_s = optional_number(j, "duration_s");
    c.contact_hash = j.at("contact").get<std::string>();
    if (c.kind == CommKind::message && c.duration_s) throw Error("messages carry no duration");
    if (c.duration_s && *c.duration_s < 0.0) throw Error("negative duration");
    s.comm.push_back(std::move(c));
  });
  for_each_record(dir / "heartbeat.jsonl", [&](const json& j) {
    HeartbeatInterval h{j.at("start").get<TimestampMs>(), j.at("end").get<TimestampMs>()};
    if (h.end < h.start) throw Error("heartbeat interval ends before it starts");
    s.heartbeat.push_back(h);
  });
  return s;
}

void write_streams(const fs::path& dir, const EventStreams& s) {
  fs::create_directories(dir);
  write_records(dir / "location.jsonl", s.location, [](const LocationSample& x) {
    return json{{"t", x.t},
                {"lat", x.lat},
                {"lon", x.lon},
                {"accuracy_m", x.accuracy_m},
                {"speed_mps", optional_json(x.speed_mps)}};
  });
  write_records(dir / "steps.jsonl", s.steps, [](const StepEvent& x) {
    return json{{"t", x.t},
                {"cumulative_steps", x.cumulative_steps},
                {"cumulative_distance_m", x.cumulative_distance_m}};
  });
  write_records(dir / "activity.jsonl", s.activity, [](const ActivityInterval& x) {
    return json{{"kind", to_string(x.kind)}, {"start", x.start}, {"end", x.end}};
  });
  write_records(dir / "gait.jsonl", s.gait, [](const GaitDailyMetrics& g) {
    return json{{"t", g.t},
                {"walking_speed", min_avg_max_json(g.walking_speed)},
                {"step_length", min_avg_max_json(g.step_length)},
                {"asymmetry", min_avg_max_json(g.asymmetry)},
                {"double_support", min_avg_max_json(g.double_support)}};
  });
  {
    std::ofstream out(dir / "usage.jsonl");
    if (!out) throw Error("cannot write " + (dir / "usage.jsonl").string());
    for (const auto& u : s.unlocks) {
      out << json{{"type", "unlock"}, {"t", u.t}, {"duration_s", u.duration_s}}.dump() << '\n';
    }
    for (const auto& a : s.app_usage) {
      out << json{{"type", "app"}, {"t", a.t}, {"category", a.category},
                  {"duration_s", a.duration_s}}
                 .dump()
          << '\n';
    }
  }
  write_records(dir / "typing.jsonl", s.typing, [](const TypingSession& t) {
    json keys = json::array();
    for (const auto& k : t.keystrokes) {
      keys.push_back({{"t_down", k.t_down},
                      {"t_up", k.t_up},
                      {"key", to_string(k.key_class)},
                      {"distance_to_center", optional_json(k.distance_to_center)}});
    }
    return json{{"start", t.start},
                {"end", t.end},
                {"orientation", to_string(t.orientation)},
                {"word_count", t.word_count},
                {"taps", t.taps},
                {"deletes", t.deletes},
                {"altered_words", t.altered_words},
                {"corrections", t.corrections},
                {"pauses", t.pauses},
                {"keystrokes", keys}};
  });
  write_records(dir / "comm.jsonl", s.comm, [](const CommEvent& c) {
    return json{{"kind", to_string(c.kind)},
                {"direction", to_string(c.direction)},
                {"t", c.t},
                {"duration_s", optional_json(c.duration_s)},
                {"contact", c.contact_hash}};
  });
  write_records(dir / "heartbeat.jsonl", s.heartbeat, [](const HeartbeatInterval& h) {
    return json{{"start", h.start}, {"end", h.end}};
  });
}

std::vector<SensorDay> partition_days(const Manifest& manifest, EventStreams streams,
                                      const CoverageConfig& coverage) {
  // Group the day table by date; the first listed offset defines the day.
  std::map<Date, std::vector<int>> offsets;
  for (const auto& d : manifest.days) {
    auto& v = offsets[d.date];
    if (std::find(v.begin(), v.end(), d.tz_offset_minutes) == v.end()) {
      v.push_back(d.tz_offset_minutes);
    }
  }
  std::vector<SensorDay> days;
  days.reserve(offsets.size());
  for (auto it = offsets.begin(); it != offsets.end(); ++it) {
    std::optional<int> next_offset;
    auto next = std::next(it);
    if (next != offsets.end() && next->first == it->first + std::chrono::days{1}) {
      next_offset = next->second.front();
    }
    SensorDay day;
    day.day = make_local_day(manifest.participant_id, it->first, it->second.front(), next_offset);
    day.multi_timezone = it->second.size() > 1;
    days.push_back(std::move(day));
  }
  for (std::size_t i = 1; i < days.size(); ++i) {
    if (days[i].day.day_start < days[i - 1].day.day_end) {
      throw Error(manifest.participant_id + ": day " + format_date(days[i].day.date) +
                  " overlaps the previous day");
    }
  }

  auto locate = [&](TimestampMs t, std::string_view stream) -> SensorDay& {
    auto it = std::upper_bound(days.begin(), days.end(), t, [](TimestampMs v, const SensorDay& d) {
      return v < d.day.day_start;
    });
    if (it != days.begin()) {
      auto& d = *std::prev(it);
      if (d.day.contains(t)) return d;
    }
    throw Error(manifest.participant_id + ": " + std::string(stream) + " record at t=" +
                std::to_string(t) + " falls outside every manifest day");
  };

  for (auto& x : streams.location) locate(x.t, "location").streams.location.push_back(x);
  for (auto& x : streams.steps) locate(x.t, "steps").streams.steps.push_back(x);
  for (auto& x : streams.activity) locate(x.start, "activity").streams.activity.push_back(x);
  for (auto& x : streams.gait) locate(x.t, "gait").streams.gait.push_back(x);
  for (auto& x : streams.unlocks) locate(x.t, "usage").streams.unlocks.push_back(x);
  for (auto& x : streams.app_usage) locate(x.t, "usage").streams.app_usage.push_back(std::move(x));
  for (auto& x : streams.typing) locate(x.start, "typing").streams.typing.push_back(std::move(x));
  for (auto& x : streams.comm) locate(x.t, "comm").streams.comm.push_back(std::move(x));
  for (auto& x : streams.heartbeat) locate(x.start, "heartbeat").streams.heartbeat.push_back(x);

  for (auto& d : days) {
    auto& s = d.streams;
    std::sort(s.location.begin(), s.location.end(), location_less);
    std::sort(s.steps.begin(), s.steps.end(), steps_less);
    std::sort(s.activity.begin(), s.activity.end(), activity_less);
    std::sort(s.gait.begin(), s.gait.end(), gait_less);
    std::sort(s.unlocks.begin(), s.unlocks.end(), unlock_less);
    std::sort(s.app_usage.begin(), s.app_usage.end(), app_less);
    std::sort(s.typing.begin(), s.typing.end(), typing_less);
    std::sort(s.comm.begin(), s.comm.end(), comm_less);
    std::sort(s.heartbeat.begin(), s.heartbeat.end(), heartbeat_less);
    for (auto& session : s.typing) {
      std::sort(session.keystrokes.begin(), session.keystrokes.end(),
                [](const Keystroke& a, const Keystroke& b) {
                  return std::tie(a.t_down, a.t_up, a.key_class, a.distance_to_center) <
                         std::tie(b.t_down, b.t_up, b.key_class, b.distance_to_center);
                });
    }
    d.coverage_hours = compute_coverage(d, coverage);
  }
  return days;
}

EventStreams merge_days(const std::vector<SensorDay>& days) {
  EventStreams out;
  auto append = [](auto& dst, const auto& src) { dst.insert(dst.end(), src.begin(), src.end()); };
  for (const auto& d : days) {
    append(out.location, d.streams.location);
    append(out.steps, d.streams.steps);
    append(out.activity, d.streams.activity);
    append(out.gait, d.streams.gait);
    append(out.unlocks, d.streams.unlocks);
    append(out.app_usage, d.streams.app_usage);
    append(out.typing, d.streams.typing);
    append(out.comm, d.streams.comm);
    append(out.heartbeat, d.streams.heartbeat);
  }
  return out;
}

Participant load_participant(const fs::path& dir, const CoverageConfig& coverage) {
  Manifest manifest = read_manifest(dir / "manifest.json");
  Participant p;
  p.id = manifest.participant_id;
  p.label = manifest.label;
  p.demographics = manifest.demographics;
  p.days = partition_days(manifest, read_streams(dir), coverage);
  return p;
}

std::vector<Participant> load_cohort(const fs::path& cohort_dir, const CoverageConfig& coverage) {
  if (!fs::is_directory(cohort_dir)) {
    throw Error("cohort directory not found: " + cohort_dir.string());
  }
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(cohort_dir)) {
    if (entry.is_directory() && fs::exists(entry.path() / "manifest.json")) {
      dirs.push_back(entry.path());
    }
  }
  std::sort(dirs.begin(), dirs.end());
  std::vector<Participant> out;
  out.reserve(dirs.size());
  for (const auto& d : dirs) out.push_back(load_participant(d, coverage));
  std::sort(out.begin(), out.end(),
            [](const Participant& a, const Participant& b) { return a.id < b.id; });
  return out;
}

double compute_coverage(const SensorDay& sd, const CoverageConfig& config) {
  const LocalDay& day = sd.day;
  const TimestampMs window_start =
      day.day_start + static_cast<TimestampMs>(config.window_start_hour * kMsPerHour);
  const TimestampMs window_end =
      std::min(day.day_end,
               day.day_start + static_cast<TimestampMs>(config.window_end_hour * kMsPerHour));
  if (window_end <= window_start) return 0.0;
  const auto minutes = static_cast<std::size_t>((window_end - window_start) / kMsPerMinute);
  std::vector<bool> covered(minutes, false);

  auto mark_interval = [&](TimestampMs a, TimestampMs b) {
    a = std::max(a, window_start);
    b = std::min(b, window_end);
    if (b <= a) return;
    const auto first = static_cast<std::size_t>((a - window_start) / kMsPerMinute);
    const auto last = static_cast<std::size_t>((b - window_start + kMsPerMinute - 1) / kMsPerMinute);
    for (std::size_t m = first; m < std::min(last, minutes); ++m) covered[m] = true;
  };
  auto mark_point = [&](TimestampMs t) {
    if (t < window_start || t >= window_end) return;
    const auto m = static_cast<std::size_t>((t - window_start) / kMsPerMinute);
    if (m < minutes) covered[m] = true;
  };

  const auto& s = sd.streams;
  for (const auto& h : s.heartbeat) mark_interval(h.start, h.end);
  for (const auto& a : s.activity) mark_interval(a.start, a.end);
  for (const auto& t : s.typing) mark_interval(t.start, t.end);
  for (const auto& x : s.location) mark_point(x.t);
  for (const auto& x : s.steps) mark_point(x.t);
  for (const auto& x : s.gait) mark_point(x.t);
  for (const auto& x : s.unlocks) mark_point(x.t);
  for (const auto& x : s.app_usage) mark_point(x.t);
  for (const auto& x : s.comm) mark_point(x.t);

  const auto n = static_cast<double>(std::count(covered.begin(), covered.end(), true));
  return n / 60.0;
}

bool is_valid_day(const SensorDay& day, const CoverageConfig& config) {
  return day.coverage_hours >= config.min_valid_hours && !day.multi_timezone;
}

}  // namespace cogsense
