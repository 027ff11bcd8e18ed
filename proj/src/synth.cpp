#include "cogsense/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "cogsense/parallel.hpp"
#include "cogsense/rng.hpp"
#include "json_util.hpp"

namespace cogsense {

namespace fs = std::filesystem;
using nlohmann::json;

void CohortSpec::validate() const {
  if (participants == 0) throw Error("cohort spec: participants must be positive");
  if (days == 0) throw Error("cohort spec: days must be positive");
  if (!(impaired_fraction > 0.0 && impaired_fraction < 1.0)) {
    throw Error("cohort spec: impaired_fraction must lie in (0, 1)");
  }
  if (invalid_day_rate < 0.0 || invalid_day_rate >= 1.0 || travel_day_rate < 0.0 ||
      travel_day_rate >= 1.0) {
    throw Error("cohort spec: day rates must lie in [0, 1)");
  }
  if (!(effects.walking_speed_factor > 0.0)) {
    throw Error("cohort spec: walking_speed_factor must be positive");
  }
  if (routine.min_places == 0 || routine.min_places > routine.max_places) {
    throw Error("cohort spec: need 1 <= min_places <= max_places");
  }
  parse_date(start_date);
}

namespace {

json spec_to_json(const CohortSpec& s) {
  return json{
      {"participants", s.participants},
      {"days", s.days},
      {"impaired_fraction", s.impaired_fraction},
      {"start_date", s.start_date},
      {"tz_offset_minutes", s.tz_offset_minutes},
      {"invalid_day_rate", s.invalid_day_rate},
      {"travel_day_rate", s.travel_day_rate},
      {"seed", s.seed},
      {"effects",
       {{"key_hold_ms", s.effects.key_hold_ms},
        {"walking_speed_factor", s.effects.walking_speed_factor},
        {"unlock_count", s.effects.unlock_count},
        {"education_years", s.effects.education_years}}},
      {"routine",
       {{"min_places", s.routine.min_places},
        {"max_places", s.routine.max_places},
        {"outings_per_day", s.routine.outings_per_day},
        {"walks_per_day", s.routine.walks_per_day},
        {"typing_sessions_per_day", s.routine.typing_sessions_per_day},
        {"calls_per_day", s.routine.calls_per_day},
        {"messages_per_day", s.routine.messages_per_day},
        {"unlocks_per_day", s.routine.unlocks_per_day},
        {"day_noise", s.routine.day_noise}}},
  };
}

CohortSpec spec_from_json(const json& j) {
  CohortSpec s;
  s.participants = j.at("participants").get<std::size_t>();
  s.days = j.at("days").get<std::size_t>();
  s.impaired_fraction = j.at("impaired_fraction").get<double>();
  s.start_date = j.at("start_date").get<std::string>();
  s.tz_offset_minutes = j.at("tz_offset_minutes").get<int>();
  s.invalid_day_rate = j.at("invalid_day_rate").get<double>();
  s.travel_day_rate = j.at("travel_day_rate").get<double>();
  s.seed = j.at("seed").get<std::uint64_t>();
  const json& e = j.at("effects");
  s.effects.key_hold_ms = e.at("key_hold_ms").get<double>();
  s.effects.walking_speed_factor = e.at("walking_speed_factor").get<double>();
  s.effects.unlock_count = e.at("unlock_count").get<double>();
  s.effects.education_years = e.at("education_years").get<double>();
  const json& r = j.at("routine");
  s.routine.min_places = r.at("min_places").get<std::size_t>();
  s.routine.max_places = r.at("max_places").get<std::size_t>();
  s.routine.outings_per_day = r.at("outings_per_day").get<double>();
  s.routine.walks_per_day = r.at("walks_per_day").get<double>();
  s.routine.typing_sessions_per_day = r.at("typing_sessions_per_day").get<double>();
  s.routine.calls_per_day = r.at("calls_per_day").get<double>();
  s.routine.messages_per_day = r.at("messages_per_day").get<double>();
  s.routine.unlocks_per_day = r.at("unlocks_per_day").get<double>();
  s.routine.day_noise = r.at("day_noise").get<double>();
  s.validate();
  return s;
}

constexpr std::array<const char*, 29> kAppCategories{
    "business",      "developer_tools", "finance",           "productivity",
    "utilities",     "books",           "education",         "navigation",
    "news",          "newsstand",       "reference",         "weather",
    "social_networking", "food_and_drink", "lifestyle",      "shopping",
    "travel",        "health_and_fitness", "medical",        "catalogs",
    "entertainment", "games",           "graphics_and_design", "kids",
    "miscellaneous", "music",           "photo_and_video",   "sports",
    "stickers"};

constexpr double kMetersPerDegree = 111320.0;

LatLon offset_by(LatLon p, double east_m, double north_m) {
  return {p.lat + north_m / kMetersPerDegree,
          p.lon + east_m / (kMetersPerDegree * std::cos(p.lat * std::numbers::pi / 180.0))};
}

// Stable per-participant behaviour.
struct Traits {
  LatLon home;
  std::vector<LatLon> places;
  std::vector<double> weekday_pref, weekend_pref;
  double wake_h = 7.0, sleep_h = 22.5;
  double outings_weekday = 1.0, outings_weekend = 1.0;
  double walk_rate = 2.0, walk_minutes = 15.0, cadence = 1.8, stride_m = 0.65;
  double asymmetry = 0.05, double_support = 0.28;
  bool runner = false, cyclist = false;
  double typing_rate = 6.0, hold_ms = 100.0, transition_ms = 180.0, delete_rate = 0.08,
         center = 0.3;
  double unlock_rate = 40.0, unlock_mean_s = 60.0;
  double call_rate = 1.0, message_rate = 3.0;
  std::size_t contacts = 6;
  std::vector<double> app_pref;
};

class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  double normal(double m, double s) { return std::normal_distribution<double>(m, s)(rng_); }
  double exponential(double mean) { return std::exponential_distribution<double>(1.0 / mean)(rng_); }
  int poisson(double mean) { return mean > 0.0 ? std::poisson_distribution<int>(mean)(rng_) : 0; }
  bool bernoulli(double p) { return uniform(0.0, 1.0) < p; }
  std::size_t pick(const std::vector<double>& w) {
    return std::discrete_distribution<std::size_t>(w.begin(), w.end())(rng_);
  }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  Rng& engine() { return rng_; }

 private:
  Rng rng_;
};

Traits draw_traits(const CohortSpec& spec, bool impaired, Draw& d) {
  const auto& r = spec.routine;
  const auto& fx = spec.effects;
  Traits t;
  t.home = offset_by({30.2672, -97.7431}, d.uniform(-12000, 12000), d.uniform(-12000, 12000));
  const auto n_places = r.min_places + d.index(r.max_places - r.min_places + 1);
  for (std::size_t i = 0; i < n_places; ++i) {
    const double dist = d.uniform(800, 9000), angle = d.uniform(0, 2 * std::numbers::pi);
    t.places.push_back(offset_by(t.home, dist * std::cos(angle), dist * std::sin(angle)));
    t.weekday_pref.push_back(d.exponential(1.0));
    t.weekend_pref.push_back(d.exponential(1.0));
  }
  t.wake_h = std::clamp(d.normal(7.0, 0.8), 5.0, 9.5);
  t.sleep_h = std::clamp(d.normal(22.3, 0.6), 20.5, 23.6);
  t.outings_weekday = r.outings_per_day * d.uniform(0.4, 1.6);
  t.outings_weekend = r.outings_per_day * d.uniform(0.3, 1.8);
  t.walk_rate = r.walks_per_day * d.uniform(0.4, 1.6);
  t.walk_minutes = d.uniform(6.0, 25.0);
  t.cadence = std::clamp(d.normal(1.75, 0.1), 1.3, 2.2);
  t.stride_m = std::clamp(d.normal(0.62, 0.05), 0.4, 0.85) * (impaired ? fx.walking_speed_factor : 1.0);
  t.asymmetry = std::clamp(d.normal(0.06, 0.02), 0.0, 0.3);
  t.double_support = std::clamp(d.normal(0.29, 0.02), 0.15, 0.45);
  t.runner = d.bernoulli(0.15);
  t.cyclist = d.bernoulli(0.2);
  t.typing_rate = r.typing_sessions_per_day * d.uniform(0.4, 1.6);
  t.hold_ms = std::max(40.0, d.normal(100.0, 12.0)) + (impaired ? fx.key_hold_ms : 0.0);
  t.transition_ms = std::max(60.0, d.normal(190.0, 30.0));
  t.delete_rate = std::clamp(d.normal(0.07, 0.02), 0.01, 0.2);
  t.center = std::clamp(d.normal(0.32, 0.06), 0.05, 0.8);
  t.unlock_rate = r.unlocks_per_day * d.uniform(0.6, 1.4) + (impaired ? fx.unlock_count : 0.0);
  t.unlock_mean_s = d.uniform(30.0, 120.0);
  t.call_rate = r.calls_per_day * d.uniform(0.3, 1.7);
  t.message_rate = r.messages_per_day * d.uniform(0.3, 1.7);
  t.contacts = 3 + d.index(12);
  for (std::size_t i = 0; i < kAppCategories.size(); ++i) {
    t.app_pref.push_back(d.bernoulli(0.4) ? d.exponential(1.0) : 0.02);
  }
  return t;
}

struct Segment {
  double start_h, end_h;
  int place;  // -1 home, -2 travelling
  LatLon from, to;
};

class DayBuilder {
 public:
  DayBuilder(const Traits& traits, const std::string& pid, TimestampMs day_start, bool weekend,
             double noise, Draw& d, EventStreams& out)
      : t_(traits), pid_(pid), start_(day_start), weekend_(weekend), noise_(noise), d_(d), out_(out) {}

  void build() {
    wake_ = std::clamp(t_.wake_h + d_.normal(0, 0.3), 4.5, 10.0);
    sleep_ = std::clamp(t_.sleep_h + d_.normal(0, 0.3), wake_ + 8.0, 23.8);
    schedule();
    location();
    walks();
    usage();
    typing();
    comm();
  }

 private:
  TimestampMs at(double h) const { return start_ + static_cast<TimestampMs>(std::llround(h * kMsPerHour)); }
  double rate(double mean) { return mean * std::exp(d_.normal(0.0, noise_)); }
  double awake_time() { return d_.uniform(wake_ + 0.2, sleep_ - 0.2); }

  void schedule() {
    const int outings = std::min(3, d_.poisson(rate(weekend_ ? t_.outings_weekend : t_.outings_weekday)));
    std::vector<double> starts;
    for (int i = 0; i < outings; ++i) starts.push_back(d_.uniform(wake_ + 1.0, sleep_ - 2.5));
    std::sort(starts.begin(), starts.end());
    double cursor = 0.0;
    for (double s : starts) {
      if (s < cursor + 0.5) continue;
      const int place = static_cast<int>(d_.pick(weekend_ ? t_.weekend_pref : t_.weekday_pref));
      const LatLon dest = t_.places[static_cast<std::size_t>(place)];
      const double travel = d_.uniform(0.15, 0.35);
      const double stay = d_.uniform(0.5, 2.5);
      if (s + 2 * travel + stay > sleep_ - 0.3) continue;
      segments_.push_back({cursor, s, -1, t_.home, t_.home});
      segments_.push_back({s, s + travel, -2, t_.home, dest});
      segments_.push_back({s + travel, s + travel + stay, place, dest, dest});
      segments_.push_back({s + travel + stay, s + 2 * travel + stay, -2, dest, t_.home});
      out_.activity.push_back({ActivityKind::automotive, at(s), at(s + travel)});
      out_.activity.push_back({ActivityKind::automotive, at(s + travel + stay), at(s + 2 * travel + stay)});
      cursor = s + 2 * travel + stay;
    }
    segments_.push_back({cursor, 24.0, -1, t_.home, t_.home});
  }

  void location() {
    for (const auto& seg : segments_) {
      const bool moving = seg.place == -2;
      const double step_h = moving ? 2.0 / 60.0 : 10.0 / 60.0;
      const double span = seg.end_h - seg.start_h;
      const double speed = haversine_m(seg.from, seg.to) / std::max(span * 3600.0, 1.0);
      for (double h = seg.start_h + d_.uniform(0.0, step_h); h < seg.end_h; h += step_h) {
        const double frac = moving ? (h - seg.start_h) / span : 0.0;
        LatLon p{seg.from.lat + frac * (seg.to.lat - seg.from.lat),
                 seg.from.lon + frac * (seg.to.lon - seg.from.lon)};
        p = offset_by(p, d_.normal(0, 8), d_.normal(0, 8));
        LocationSample s;
        s.t = at(h);
        s.lat = p.lat;
        s.lon = p.lon;
        s.accuracy_m = d_.bernoulli(0.02) ? d_.uniform(120, 400) : d_.uniform(5, 35);
        if (moving) s.speed_mps = speed;
        out_.location.push_back(s);
      }
    }
  }

  bool at_home(double h) const {
    for (const auto& s : segments_) {
      if (h >= s.start_h && h < s.end_h) return s.place == -1;
    }
    return true;
  }

  void walks() {
    const int n = std::min(6, d_.poisson(rate(t_.walk_rate)));
    std::vector<std::pair<double, double>> spans;
    for (int i = 0; i < n; ++i) {
      const double start = awake_time();
      const double minutes = std::clamp(t_.walk_minutes * std::exp(d_.normal(0.0, 0.35)), 2.0, 90.0);
      const double end = start + minutes / 60.0;
      if (end > sleep_ || !at_home(start)) continue;
      bool clash = false;
      for (const auto& [a, b] : spans) clash = clash || (start < b + 0.05 && end > a - 0.05);
      if (!clash) spans.emplace_back(start, end);
    }
    std::sort(spans.begin(), spans.end());

    struct Raw { TimestampMs t; double steps; double meters; };
    std::vector<Raw> raw;
    std::vector<double> speeds, strides;
    for (const auto& [a, b] : spans) {
      const double cadence = t_.cadence * std::exp(d_.normal(0.0, 0.04));
      const double stride = t_.stride_m * std::exp(d_.normal(0.0, 0.04));
      speeds.push_back(cadence * stride);
      strides.push_back(stride);
      double h = a;
      while (true) {
        const double gap_s = d_.uniform(1.6, 2.4);
        h += gap_s / 3600.0;
        if (h > b) break;
        const double steps = std::round(cadence * gap_s);
        raw.push_back({at(h), steps, steps * stride});
      }
      out_.activity.push_back({ActivityKind::walking, at(a), at(b)});
    }
    // Scattered indoor steps that never form a walking period.
    for (int i = d_.poisson(15); i > 0; --i) {
      const double steps = static_cast<double>(3 + d_.index(7));
      raw.push_back({at(awake_time()), steps, steps * t_.stride_m});
    }
    if (t_.runner && d_.bernoulli(0.3)) {
      const double s = awake_time();
      out_.activity.push_back({ActivityKind::running, at(s), at(s + d_.uniform(0.2, 0.5))});
    }
    if (t_.cyclist && d_.bernoulli(0.3)) {
      const double s = awake_time();
      out_.activity.push_back({ActivityKind::cycling, at(s), at(s + d_.uniform(0.3, 1.0))});
    }
    std::sort(raw.begin(), raw.end(), [](const Raw& x, const Raw& y) { return x.t < y.t; });
    std::int64_t steps = 0;
    double meters = 0.0;
    for (const auto& r : raw) {
      steps += static_cast<std::int64_t>(r.steps);
      meters += r.meters;
      out_.steps.push_back({r.t, steps, meters});
    }
    if (!speeds.empty()) {
      const auto mam = [](const std::vector<double>& v) {
        double sum = 0.0;
        for (double x : v) sum += x;
        return MinAvgMax{*std::min_element(v.begin(), v.end()), sum / static_cast<double>(v.size()),
                         *std::max_element(v.begin(), v.end())};
      };
      GaitDailyMetrics g;
      g.t = at(sleep_);
      g.walking_speed = mam(speeds);
      g.step_length = mam(strides);
      const double asym = std::clamp(t_.asymmetry + d_.normal(0, 0.01), 0.0, 1.0);
      const double ds = std::clamp(t_.double_support + d_.normal(0, 0.01), 0.0, 1.0);
      g.asymmetry = MinAvgMax{asym * 0.5, asym, asym * 1.8};
      g.double_support = MinAvgMax{ds - 0.03, ds, ds + 0.04};
      out_.gait.push_back(g);
    }
  }

  void usage() {
    for (int i = d_.poisson(rate(t_.unlock_rate)); i > 0; --i) {
      const double h = awake_time();
      const double duration = std::min(d_.exponential(t_.unlock_mean_s), 3600.0);
      out_.unlocks.push_back({at(h), duration});
      if (d_.bernoulli(0.7)) {
        const auto cat = kAppCategories[d_.pick(t_.app_pref)];
        out_.app_usage.push_back({at(h) + 1000, cat, duration * d_.uniform(0.3, 1.0)});
      }
    }
  }

  void typing() {
    for (int i = d_.poisson(rate(t_.typing_rate)); i > 0; --i) {
      TypingSession s;
      s.start = at(awake_time());
      s.orientation = d_.bernoulli(0.05) ? Orientation::landscape : Orientation::portrait;
      s.word_count = 1 + d_.poisson(6.0);
      TimestampMs cursor = s.start + 300;
      KeyClass prev = KeyClass::other;
      const auto press = [&](KeyClass k) {
        Keystroke key;
        const double gap = prev == KeyClass::character ? std::max(20.0, d_.normal(t_.transition_ms, 45.0))
                                                       : std::max(60.0, d_.normal(260.0, 60.0));
        key.t_down = cursor + static_cast<TimestampMs>(gap);
        const double hold = k == KeyClass::character ? std::max(30.0, d_.normal(t_.hold_ms, 18.0))
                                                     : std::max(30.0, d_.normal(95.0, 15.0));
        key.t_up = key.t_down + static_cast<TimestampMs>(hold);
        key.key_class = k;
        if (k == KeyClass::character) key.distance_to_center = std::abs(d_.normal(t_.center, 0.12));
        s.keystrokes.push_back(key);
        cursor = key.t_up;
        prev = k;
      };
      for (std::int64_t w = 0; w < s.word_count; ++w) {
        for (std::size_t c = 2 + d_.index(6); c > 0; --c) {
          press(KeyClass::character);
          if (d_.bernoulli(t_.delete_rate)) {
            press(KeyClass::del);
            ++s.deletes;
          }
        }
        press(KeyClass::other);
      }
      s.taps = static_cast<std::int64_t>(s.keystrokes.size());
      s.altered_words = d_.poisson(0.3);
      s.corrections = d_.poisson(0.5);
      s.pauses = d_.poisson(1.0);
      s.end = cursor + 500;
      out_.typing.push_back(std::move(s));
    }
  }

  void comm() {
    const auto contact = [&] {
      // Lower-ranked contacts are reached more often.
      std::size_t k = 0;
      while (k + 1 < t_.contacts && d_.bernoulli(0.55)) ++k;
      std::ostringstream h;
      h << std::hex << hash_string(pid_ + "#" + std::to_string(k));
      return h.str();
    };
    for (int i = d_.poisson(rate(t_.call_rate)); i > 0; --i) {
      CommEvent c;
      c.kind = CommKind::call;
      c.direction = d_.bernoulli(0.5) ? CommDirection::incoming : CommDirection::outgoing;
      c.t = at(awake_time());
      c.duration_s = std::round(d_.exponential(150.0));
      c.contact_hash = contact();
      out_.comm.push_back(std::move(c));
    }
    for (int i = d_.poisson(rate(t_.message_rate)); i > 0; --i) {
      CommEvent c;
      c.kind = CommKind::message;
      c.direction = d_.bernoulli(0.5) ? CommDirection::incoming : CommDirection::outgoing;
      c.t = at(awake_time());
      c.contact_hash = contact();
      out_.comm.push_back(std::move(c));
    }
  }

  const Traits& t_;
  const std::string& pid_;
  TimestampMs start_;
  bool weekend_;
  double noise_;
  Draw& d_;
  EventStreams& out_;
  double wake_ = 7.0, sleep_ = 22.0;
  std::vector<Segment> segments_;
};

void heartbeat(EventStreams& out, TimestampMs start, TimestampMs end, Draw& d) {
  for (TimestampMs t = start; t < end; t += 30 * kMsPerMinute) {
    if (d.bernoulli(0.04)) continue;
    out.heartbeat.push_back({t, std::min(end, t + 30 * kMsPerMinute)});
  }
}

// Drops every record at or after `cut`.
void truncate_streams(EventStreams& s, TimestampMs cut) {
  const auto drop = [&](auto& v, auto time) {
    std::erase_if(v, [&](const auto& x) { return time(x) >= cut; });
  };
  drop(s.location, [](const LocationSample& x) { return x.t; });
  drop(s.steps, [](const StepEvent& x) { return x.t; });
  drop(s.activity, [](const ActivityInterval& x) { return x.start; });
  drop(s.gait, [](const GaitDailyMetrics& x) { return x.t; });
  drop(s.unlocks, [](const UnlockEvent& x) { return x.t; });
  drop(s.app_usage, [](const AppUsage& x) { return x.t; });
  drop(s.typing, [](const TypingSession& x) { return x.start; });
  drop(s.comm, [](const CommEvent& x) { return x.t; });
  drop(s.heartbeat, [](const HeartbeatInterval& x) { return x.start; });
}

std::string participant_id(std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "P%03zu", index + 1);
  return buf;
}

std::vector<bool> impaired_flags(const CohortSpec& spec) {
  const auto n_imp = static_cast<std::size_t>(
      std::llround(spec.impaired_fraction * static_cast<double>(spec.participants)));
  std::vector<std::size_t> order(spec.participants);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(spec.seed, {0x1abe1}));
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<bool> flags(spec.participants, false);
  for (std::size_t i = 0; i < std::min(n_imp, order.size()); ++i) flags[order[i]] = true;
  return flags;
}

}  // namespace

CohortSpec cohort_spec_from_json_text(const std::string& text) {
  json merged = spec_to_json(CohortSpec{});
  try {
    detail::merge_checked(merged, json::parse(text), "");
    return spec_from_json(merged);
  } catch (const json::exception& e) {
    throw Error(std::string("invalid cohort spec: ") + e.what());
  }
}

CohortSpec load_cohort_spec(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw Error("cannot read cohort spec " + file.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return cohort_spec_from_json_text(buf.str());
  } catch (const Error& e) {
    throw Error(file.string() + ": " + e.what());
  }
}

std::string cohort_spec_to_json_text(const CohortSpec& spec) { return spec_to_json(spec).dump(2); }

GeneratedParticipant generate_participant(const CohortSpec& spec, std::size_t index) {
  spec.validate();
  const std::string pid = participant_id(index);
  const bool impaired = impaired_flags(spec)[index];
  Draw traits_draw(derive_seed(spec.seed, {hash_string(pid), 1}));

  GeneratedParticipant g;
  auto& m = g.manifest;
  m.participant_id = pid;
  m.label = impaired ? 1 : 0;
  m.demographics.age = std::max(65.0, std::round(traits_draw.normal(75.5, 5.2)));
  m.demographics.sex = traits_draw.bernoulli(0.5) ? Sex::male : Sex::female;
  m.demographics.education =
      std::clamp(std::round(traits_draw.normal(16.3, 1.9)), 10.0, 22.0) +
      (impaired ? spec.effects.education_years : 0.0);
  const Traits traits = draw_traits(spec, impaired, traits_draw);

  const Date first = parse_date(spec.start_date);
  for (std::size_t k = 0; k < spec.days; ++k) {
    const Date date = first + std::chrono::days(k);
    Draw d(derive_seed(spec.seed, {hash_string(pid), 2, k}));
    const bool travel = d.bernoulli(spec.travel_day_rate);
    const bool low = d.bernoulli(spec.invalid_day_rate);
    m.days.push_back({date, spec.tz_offset_minutes});
    if (travel) {
      m.days.push_back({date, spec.tz_offset_minutes + 60});
      g.travel_days.push_back(date);
    }
    const TimestampMs start = local_midnight_utc(date, spec.tz_offset_minutes);
    const TimestampMs end = start + 24 * kMsPerHour;
    const unsigned wd = std::chrono::weekday(date).c_encoding();
    EventStreams day;
    DayBuilder(traits, pid, start, wd == 0 || wd == 6, spec.routine.day_noise, d, day).build();
    if (low) {
      const TimestampMs cut = start + static_cast<TimestampMs>(d.uniform(9.0, 14.0) * kMsPerHour);
      heartbeat(day, start + 6 * kMsPerHour, std::min(cut, start + 12 * kMsPerHour), d);
      truncate_streams(day, cut);
      g.low_coverage_days.push_back(date);
    } else {
      heartbeat(day, start, end, d);
    }
    const auto append = [](auto& dst, auto& src) {
      dst.insert(dst.end(), std::make_move_iterator(src.begin()), std::make_move_iterator(src.end()));
    };
    auto& s = g.streams;
    append(s.location, day.location);
    append(s.steps, day.steps);
    append(s.activity, day.activity);
    append(s.gait, day.gait);
    append(s.unlocks, day.unlocks);
    append(s.app_usage, day.app_usage);
    append(s.typing, day.typing);
    append(s.comm, day.comm);
    append(s.heartbeat, day.heartbeat);
  }
  return g;
}

void generate_cohort(const CohortSpec& spec, const fs::path& out, std::size_t jobs) {
  spec.validate();
  fs::create_directories(out);
  std::vector<json> entries(spec.participants);
  parallel_for(spec.participants, jobs, [&](std::size_t i) {
    auto g = generate_participant(spec, i);
    const fs::path dir = out / g.manifest.participant_id;
    fs::create_directories(dir);
    write_manifest(dir / "manifest.json", g.manifest);
    write_streams(dir, g.streams);
    json counts = json::object();
    const auto c = g.streams.counts();
    for (std::size_t k = 0; k < kStreamNames.size(); ++k) counts[std::string(kStreamNames[k])] = c[k];
    std::vector<std::string> low, travel;
    for (auto d : g.low_coverage_days) low.push_back(format_date(d));
    for (auto d : g.travel_days) travel.push_back(format_date(d));
    const bool impaired = g.manifest.label == 1;
    entries[i] = json{
        {"participant_id", g.manifest.participant_id},
        {"label", g.manifest.label},
        {"demographics",
         {{"age", g.manifest.demographics.age},
          {"sex", std::string(to_string(g.manifest.demographics.sex))},
          {"education", g.manifest.demographics.education}}},
        {"planted",
         {{"key_hold_ms", impaired ? spec.effects.key_hold_ms : 0.0},
          {"walking_speed_factor", impaired ? spec.effects.walking_speed_factor : 1.0},
          {"unlock_count", impaired ? spec.effects.unlock_count : 0.0},
          {"education_years", impaired ? spec.effects.education_years : 0.0}}},
        {"counts", counts},
        {"low_coverage_days", low},
        {"travel_days", travel},
    };
  });
  const json ledger{{"spec", spec_to_json(spec)}, {"participants", entries}};
  std::ofstream f(out / "ledger.json");
  if (!f) throw Error("cannot write " + (out / "ledger.json").string());
  f << ledger.dump(2) << '\n';
}

namespace {

SensorDay covered_day(const std::string& pid, Date date, int offset) {
  SensorDay s;
  s.day = make_local_day(pid, date, offset);
  s.streams.heartbeat.push_back({s.day.day_start, s.day.day_end});
  s.coverage_hours = compute_coverage(s);
  return s;
}

ParticipantSeries window_series(const std::string& id, std::size_t valid) {
  ParticipantSeries s;
  s.id = id;
  const Date first = parse_date("2024-01-01");
  // Valid days at the front, then invalid ones, with the span fixed at 30
  // days by a valid day at each end.
  for (std::size_t k = 0; k < 30; ++k) {
    const bool keep = k + 1 < valid || k == 29;
    if (keep) s.days.push_back({first + std::chrono::days(k), std::vector<double>(3, 1.0)});
  }
  return s;
}

}  // namespace

DegenerateFixtures generate_degenerate_fixtures() {
  DegenerateFixtures f;
  const Date date = parse_date("2024-05-01");
  const int offset = -300;

  f.empty_day = covered_day("FX-EMPTY", date, offset);

  f.single_location_day = covered_day("FX-ONEPOINT", date, offset);
  f.single_location_day.streams.location.push_back(
      {f.single_location_day.day.day_start + 9 * kMsPerHour, 30.0, -97.0, 10.0, std::nullopt});

  Manifest m;
  m.participant_id = "FX-TRAVEL";
  m.days = {{date, offset}, {date, offset + 120}};
  EventStreams travel;
  const TimestampMs start = local_midnight_utc(date, offset);
  travel.heartbeat.push_back({start, start + 24 * kMsPerHour});
  f.multi_timezone.id = m.participant_id;
  f.multi_timezone.days = partition_days(m, travel);

  f.landscape_typing_day = covered_day("FX-LANDSCAPE", date, offset);
  TypingSession ts;
  ts.start = f.landscape_typing_day.day.day_start + 10 * kMsPerHour;
  ts.end = ts.start + 60 * kMsPerSecond;
  ts.orientation = Orientation::landscape;
  ts.word_count = 5;
  ts.taps = 2;
  ts.keystrokes = {{ts.start + 100, ts.start + 200, KeyClass::character, 0.2},
                   {ts.start + 400, ts.start + 480, KeyClass::character, 0.4}};
  f.landscape_typing_day.streams.typing.push_back(ts);

  f.window_22 = window_series("FX-W22", 22);
  f.window_23 = window_series("FX-W23", 23);
  return f;
}

}  // namespace cogsense
