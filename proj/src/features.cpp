#include "cogsense/features.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace cogsense {

namespace fs = std::filesystem;

namespace {

constexpr std::array<std::string_view, 7> kCategoryNames{
    "activity", "pedometer_gait", "location", "usage", "typing", "communication", "meta"};

void add_stats(std::vector<FeatureSpec>& out, const std::string& prefix, FeatureCategory cat,
               const std::string& unit) {
  for (auto stat : kDistributionStatNames) {
    out.push_back({prefix + "_" + std::string(stat), cat, unit});
  }
}

std::vector<FeatureSpec> standard_specs() {
  using C = FeatureCategory;
  std::vector<FeatureSpec> f;
  for (auto kind : {"walking", "running", "cycling", "automotive"}) {
    f.push_back({std::string("activity_") + kind + "_duration", C::activity, "s"});
  }

  f.push_back({"steps_total", C::pedometer_gait, "steps"});
  f.push_back({"walk_distance_total", C::pedometer_gait, "m"});
  f.push_back({"first_step_hour", C::pedometer_gait, "h"});
  add_stats(f, "walk_period_steps", C::pedometer_gait, "steps");
  add_stats(f, "walk_period_distance", C::pedometer_gait, "m");
  add_stats(f, "walk_period_cadence", C::pedometer_gait, "steps/s");
  add_stats(f, "walk_period_pace", C::pedometer_gait, "s/m");
  const std::array<std::pair<const char*, const char*>, 4> gait{
      {{"walking_speed", "m/s"}, {"step_length", "m"}, {"asymmetry", "fraction"},
       {"double_support", "fraction"}}};
  for (const auto& [metric, unit] : gait) {
    for (auto agg : {"min", "avg", "max"}) {
      f.push_back({std::string("gait_") + metric + "_" + agg, C::pedometer_gait, unit});
    }
  }

  f.push_back({"location_log_variance", C::location, "ln(deg^2)"});
  f.push_back({"location_total_distance", C::location, "m"});
  f.push_back({"location_hull_area", C::location, "m^2"});
  f.push_back({"location_hull_perimeter", C::location, "m"});
  f.push_back({"location_hull_compactness", C::location, "ratio"});
  f.push_back({"location_stationary_duration", C::location, "s"});
  f.push_back({"location_moving_duration", C::location, "s"});
  f.push_back({"location_first_move_hour", C::location, "h"});
  f.push_back({"place_count", C::location, "clusters"});
  f.push_back({"place_total_dwell", C::location, "s"});
  f.push_back({"place_home_dwell", C::location, "s"});
  f.push_back({"place_max_pair_distance", C::location, "m"});
  f.push_back({"place_max_home_distance", C::location, "m"});
  f.push_back({"place_radius_of_gyration", C::location, "m"});
  f.push_back({"place_entropy", C::location, "nats"});
  f.push_back({"place_farthest_from_home_hour", C::location, "h"});

  f.push_back({"unlock_count", C::usage, "count"});
  f.push_back({"unlock_duration", C::usage, "s"});
  for (auto type : kUsageTypes) {
    f.push_back({"usage_share_" + std::string(type), C::usage, "fraction"});
  }

  f.push_back({"typing_duration", C::typing, "s"});
  f.push_back({"typing_sessions", C::typing, "count"});
  f.push_back({"typing_words", C::typing, "count"});
  for (auto event : {"taps", "deletes", "altered_words", "corrections", "pauses"}) {
    f.push_back({std::string("typing_") + event + "_per_word", C::typing, "1/word"});
  }
  add_stats(f, "key_hold_time", C::typing, "ms");
  add_stats(f, "key_char_transition", C::typing, "ms");
  add_stats(f, "key_char_delete_transition", C::typing, "ms");
  add_stats(f, "key_center_distance", C::typing, "key widths");

  f.push_back({"calls_incoming", C::communication, "count"});
  f.push_back({"calls_outgoing", C::communication, "count"});
  f.push_back({"messages_incoming", C::communication, "count"});
  f.push_back({"messages_outgoing", C::communication, "count"});
  f.push_back({"call_duration", C::communication, "s"});
  f.push_back({"unique_contacts", C::communication, "count"});

  f.push_back({"coverage_hours", C::meta, "h"});
  return f;
}

double clip_interval_s(TimestampMs start, TimestampMs end, const LocalDay& day) {
  const TimestampMs a = std::max(start, day.day_start);
  const TimestampMs b = std::min(end, day.day_end);
  return b > a ? static_cast<double>(b - a) / kMsPerSecond : 0.0;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  const auto last = s.find_last_not_of(" \t\r");
  if (first == std::string::npos) return {};
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string_view to_string(FeatureCategory c) { return kCategoryNames[static_cast<int>(c)]; }

const FeatureRegistry& FeatureRegistry::standard() {
  static const FeatureRegistry registry(standard_specs());
  return registry;
}

FeatureRegistry::FeatureRegistry(std::vector<FeatureSpec> specs) : specs_(std::move(specs)) {
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    if (!index_.emplace(specs_[i].name, i).second) {
      throw Error("duplicate feature name '" + specs_[i].name + "'");
    }
  }
}

std::size_t FeatureRegistry::sensing_count() const {
  return static_cast<std::size_t>(std::count_if(specs_.begin(), specs_.end(), [](const auto& s) {
    return s.category != FeatureCategory::meta;
  }));
}

std::size_t FeatureRegistry::index_of(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw Error("unknown feature '" + std::string(name) + "'");
  return it->second;
}

bool FeatureRegistry::contains(std::string_view name) const { return index_.contains(name); }

std::vector<std::size_t> FeatureRegistry::sensing_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    if (specs_[i].category != FeatureCategory::meta) out.push_back(i);
  }
  return out;
}

void FeatureRegistry::write_csv(const fs::path& file) const {
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file.string());
  out << "name,category,unit,index\n";
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    out << specs_[i].name << ',' << to_string(specs_[i].category) << ',' << specs_[i].unit << ','
        << i << '\n';
  }
}

UsageCategoryMap UsageCategoryMap::defaults() {
  UsageCategoryMap m;
  const std::array<std::pair<const char*, const char*>, 29> table{{
      {"business", "productivity"},       {"developer_tools", "productivity"},
      {"finance", "productivity"},        {"productivity", "productivity"},
      {"utilities", "productivity"},      {"books", "information"},
      {"education", "information"},       {"navigation", "information"},
      {"news", "information"},            {"newsstand", "information"},
      {"reference", "information"},       {"weather", "information"},
      {"social_networking", "social"},    {"food_and_drink", "life"},
      {"lifestyle", "life"},              {"shopping", "life"},
      {"travel", "life"},                 {"health_and_fitness", "health"},
      {"medical", "health"},              {"catalogs", "other"},
      {"entertainment", "other"},         {"games", "other"},
      {"graphics_and_design", "other"},   {"kids", "other"},
      {"miscellaneous", "other"},         {"music", "other"},
      {"photo_and_video", "other"},       {"sports", "other"},
      {"stickers", "other"},
  }};
  for (const auto& [cat, type] : table) m.set(cat, type);
  return m;
}

UsageCategoryMap UsageCategoryMap::from_csv(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw Error("cannot read usage category map " + file.string());
  UsageCategoryMap m;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || trim(line).empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw Error(file.string() + ":" + std::to_string(line_no) + ": expected category,type");
    }
    try {
      m.set(trim(line.substr(0, comma)), trim(line.substr(comma + 1)));
    } catch (const Error& e) {
      throw Error(file.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return m;
}

void UsageCategoryMap::set(std::string category, std::string_view type) {
  auto it = std::find(kUsageTypes.begin(), kUsageTypes.end(), type);
  if (it == kUsageTypes.end()) throw Error("unknown usage type '" + std::string(type) + "'");
  map_[std::move(category)] = static_cast<std::size_t>(it - kUsageTypes.begin());
}

std::size_t UsageCategoryMap::type_index(std::string_view category) const {
  auto it = map_.find(category);
  if (it == map_.end()) throw Error("unmapped app category '" + std::string(category) + "'");
  return it->second;
}

void UsageCategoryMap::write_csv(const fs::path& file) const {
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file.string());
  out << "category,type\n";
  for (const auto& [cat, type] : map_) out << cat << ',' << kUsageTypes[type] << '\n';
}

std::array<double, kActivityKindCount> activity_features(const SensorDay& day) {
  std::array<double, kActivityKindCount> out{};
  for (const auto& a : day.streams.activity) {
    out[static_cast<std::size_t>(a.kind)] += clip_interval_s(a.start, a.end, day.day);
  }
  return out;
}

std::vector<WalkingPeriod> detect_walking_periods(std::span<const StepEvent> steps,
                                                  const FeatureConfig& config) {
  std::vector<WalkingPeriod> out;
  const auto gap = static_cast<TimestampMs>(config.walk_gap_s * kMsPerSecond);
  std::size_t i = 0;
  while (i < steps.size()) {
    std::size_t j = i;
    while (j + 1 < steps.size() && steps[j + 1].t - steps[j].t <= gap) ++j;
    // Increments are relative to the previous event of the day (counters reset at midnight).
    const double base_steps = i == 0 ? 0.0 : static_cast<double>(steps[i - 1].cumulative_steps);
    const double base_dist = i == 0 ? 0.0 : steps[i - 1].cumulative_distance_m;
    WalkingPeriod p;
    p.start = steps[i].t;
    p.end = steps[j].t;
    p.steps = static_cast<double>(steps[j].cumulative_steps) - base_steps;
    p.distance_m = steps[j].cumulative_distance_m - base_dist;
    const double duration = p.duration_s();
    if (duration >= config.min_walk_duration_s &&
        p.steps > static_cast<double>(config.min_walk_steps_exclusive)) {
      p.cadence = p.steps / duration;
      if (p.distance_m > 0.0) p.pace = duration / p.distance_m;
      out.push_back(p);
    }
    i = j + 1;
  }
  return out;
}

PedometerFeatures pedometer_features(const SensorDay& day, const FeatureConfig& config) {
  PedometerFeatures f;
  const auto& steps = day.streams.steps;
  if (steps.empty()) return f;
  f.total_steps = static_cast<double>(steps.back().cumulative_steps);
  f.total_distance_m = steps.back().cumulative_distance_m;
  f.first_step_hour = local_clock_fraction(steps.front().t, day.day);

  const auto periods = detect_walking_periods(steps, config);
  std::vector<double> n, d, c, p;
  for (const auto& w : periods) {
    n.push_back(w.steps);
    d.push_back(w.distance_m);
    c.push_back(w.cadence);
    if (!is_missing(w.pace)) p.push_back(w.pace);
  }
  f.period_steps = summarize_distribution(n);
  f.period_distance = summarize_distribution(d);
  f.period_cadence = summarize_distribution(c);
  f.period_pace = summarize_distribution(p);
  return f;
}

std::array<double, 12> gait_features(const SensorDay& day) {
  std::array<double, 12> out;
  out.fill(kMissing);
  if (day.streams.gait.empty()) return out;
  // One summary per day; a later record supersedes an earlier one.
  const auto& g = day.streams.gait.back();
  const std::array<const std::optional<MinAvgMax>*, 4> metrics{
      &g.walking_speed, &g.step_length, &g.asymmetry, &g.double_support};
  for (std::size_t m = 0; m < metrics.size(); ++m) {
    if (const auto& v = *metrics[m]) {
      out[3 * m] = v->min;
      out[3 * m + 1] = v->avg;
      out[3 * m + 2] = v->max;
    }
  }
  return out;
}

UsageFeatures usage_features(const SensorDay& day, const UsageCategoryMap& map) {
  UsageFeatures f;
  f.shares.fill(kMissing);
  for (const auto& u : day.streams.unlocks) {
    f.unlock_count += 1.0;
    f.unlock_duration_s += u.duration_s;
  }
  std::array<double, kUsageTypes.size()> by_type{};
  double total = 0.0;
  for (const auto& a : day.streams.app_usage) {
    by_type[map.type_index(a.category)] += a.duration_s;
    total += a.duration_s;
  }
  if (total > 0.0) {
    for (std::size_t i = 0; i < by_type.size(); ++i) f.shares[i] = by_type[i] / total;
  }
  return f;
}

TypingFeatures typing_features(const SensorDay& day) {
  TypingFeatures f;
  std::array<double, 5> events{};
  std::vector<double> hold, char_char, char_del, center;
  for (const auto& s : day.streams.typing) {
    if (s.orientation == Orientation::landscape) continue;
    f.duration_s += static_cast<double>(s.end - s.start) / kMsPerSecond;
    f.sessions += 1.0;
    f.words += static_cast<double>(s.word_count);
    events[0] += static_cast<double>(s.taps);
    events[1] += static_cast<double>(s.deletes);
    events[2] += static_cast<double>(s.altered_words);
    events[3] += static_cast<double>(s.corrections);
    events[4] += static_cast<double>(s.pauses);
    const auto& keys = s.keystrokes;
    for (std::size_t k = 0; k < keys.size(); ++k) {
      if (keys[k].key_class == KeyClass::character) {
        hold.push_back(static_cast<double>(keys[k].t_up - keys[k].t_down));
        if (keys[k].distance_to_center) center.push_back(*keys[k].distance_to_center);
      }
      if (k == 0 || keys[k - 1].key_class != KeyClass::character) continue;
      const double gap = static_cast<double>(keys[k].t_down - keys[k - 1].t_up);
      if (keys[k].key_class == KeyClass::character) char_char.push_back(gap);
      if (keys[k].key_class == KeyClass::del) char_del.push_back(gap);
    }
  }
  if (f.words > 0.0) {
    for (std::size_t i = 0; i < events.size(); ++i) f.rates[i] = events[i] / f.words;
  }
  f.hold_ms = summarize_distribution(hold);
  f.char_transition_ms = summarize_distribution(char_char);
  f.delete_transition_ms = summarize_distribution(char_del);
  f.center_distance = summarize_distribution(center);
  return f;
}

CommFeatures comm_features(const SensorDay& day) {
  CommFeatures f;
  std::set<std::string_view> contacts;
  for (const auto& c : day.streams.comm) {
    const bool in = c.direction == CommDirection::incoming;
    if (c.kind == CommKind::call) {
      (in ? f.calls_in : f.calls_out) += 1.0;
      f.call_duration_s += c.duration_s.value_or(0.0);
    } else {
      (in ? f.messages_in : f.messages_out) += 1.0;
    }
    contacts.insert(c.contact_hash);
  }
  f.unique_contacts = static_cast<double>(contacts.size());
  return f;
}

std::vector<double> featurize_day(const SensorDay& day, const FeatureConfig& config) {
  if (!is_valid_day(day, config.coverage)) {
    throw Error("cannot featurize invalid day " + format_date(day.day.date) + " of " +
                day.day.participant_id);
  }
  std::vector<double> v;
  v.reserve(FeatureRegistry::standard().size());
  auto push_stats = [&](const DistributionStats& s) {
    for (double x : s.values()) v.push_back(x);
  };

  for (double x : activity_features(day)) v.push_back(x);

  const auto ped = pedometer_features(day, config);
  v.push_back(ped.total_steps);
  v.push_back(ped.total_distance_m);
  v.push_back(ped.first_step_hour);
  push_stats(ped.period_steps);
  push_stats(ped.period_distance);
  push_stats(ped.period_cadence);
  push_stats(ped.period_pace);
  for (double x : gait_features(day)) v.push_back(x);

  const auto samples = filter_location(day.streams.location, config.location);
  const auto stationary = classify_stationary(samples, config.location);
  const auto geo = location_geometry(samples, stationary, day.day, config.location);
  v.insert(v.end(), {geo.log_variance, geo.total_distance_m, geo.hull_area_m2,
                     geo.hull_perimeter_m, geo.hull_compactness, geo.stationary_s, geo.moving_s,
                     geo.first_move_hour});
  const auto clusters = cluster_places(samples, stationary, day.day, config.location);
  const auto places = place_features(clusters, samples, day.day);
  v.insert(v.end(), {places.cluster_count, places.cluster_dwell_s, places.home_dwell_s,
                     places.max_cluster_distance_m, places.max_home_distance_m,
                     places.radius_of_gyration_m, places.entropy,
                     places.farthest_from_home_hour});

  const auto usage = usage_features(day, config.usage_map);
  v.push_back(usage.unlock_count);
  v.push_back(usage.unlock_duration_s);
  for (double x : usage.shares) v.push_back(x);

  const auto typing = typing_features(day);
  v.push_back(typing.duration_s);
  v.push_back(typing.sessions);
  v.push_back(typing.words);
  for (double x : typing.rates) v.push_back(x);
  push_stats(typing.hold_ms);
  push_stats(typing.char_transition_ms);
  push_stats(typing.delete_transition_ms);
  push_stats(typing.center_distance);

  const auto comm = comm_features(day);
  v.insert(v.end(), {comm.calls_in, comm.calls_out, comm.messages_in, comm.messages_out,
                     comm.call_duration_s, comm.unique_contacts});

  v.push_back(day.coverage_hours);

  if (v.size() != FeatureRegistry::standard().size()) {
    throw Error("feature vector length " + std::to_string(v.size()) +
                " does not match registry size " +
                std::to_string(FeatureRegistry::standard().size()));
  }
  return v;
}

}  // namespace cogsense
