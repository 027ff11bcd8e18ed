#include <doctest.h>

#include <fstream>

#include "cogsense/ingest.hpp"
#include "support.hpp"

using namespace cogsense;
using testing::TempDir;

namespace {

Manifest two_day_manifest() {
  Manifest m;
  m.participant_id = "A01";
  m.label = 1;
  m.demographics = {74, Sex::female, 16};
  m.days = {{parse_date("2024-05-01"), -300}, {parse_date("2024-05-02"), -300}};
  return m;
}

// Minute-bitmap union of [start, end) hour intervals clipped to [6, 24).
double union_hours(const std::vector<std::pair<double, double>>& spans) {
  std::vector<bool> minute(24 * 60, false);
  for (auto [a, b] : spans) {
    for (int m = 0; m < 24 * 60; ++m) {
      const double h = m / 60.0;
      if (h >= a && h < b && h >= 6.0) minute[static_cast<std::size_t>(m)] = true;
    }
  }
  return static_cast<double>(std::count(minute.begin(), minute.end(), true)) / 60.0;
}

}  // namespace

TEST_CASE("coverage") {
  SUBCASE("full window") { CHECK(testing::covered_day(6, 24).coverage_hours == doctest::Approx(18.0)); }
  SUBCASE("night only") { CHECK(testing::covered_day(0, 6).coverage_hours == 0.0); }
  SUBCASE("two disjoint blocks") {
    auto d = testing::covered_day(6, 13);
    d.streams.heartbeat.push_back({testing::at(d, 15), testing::at(d, 22)});
    CHECK(compute_coverage(d) == doctest::Approx(union_hours({{6, 13}, {15, 22}})));
    CHECK(compute_coverage(d) == doctest::Approx(14.0));
  }
  SUBCASE("overlapping sources are not double counted") {
    auto d = testing::covered_day(8, 12);
    d.streams.activity.push_back({ActivityKind::walking, testing::at(d, 11), testing::at(d, 13)});
    d.streams.typing.push_back({testing::at(d, 12.5), testing::at(d, 14), Orientation::portrait});
    CHECK(compute_coverage(d) == doctest::Approx(union_hours({{8, 12}, {11, 13}, {12.5, 14}})));
  }
  SUBCASE("point events mark their minute") {
    auto d = testing::covered_day(0, 0);
    d.streams.unlocks.push_back({testing::at(d, 9), 10});
    d.streams.unlocks.push_back({testing::at(d, 9) + 1000, 10});  // same minute
    d.streams.comm.push_back({CommKind::message, CommDirection::incoming, testing::at(d, 10), {}, "x"});
    CHECK(compute_coverage(d) == doctest::Approx(2.0 / 60.0));
  }
}

TEST_CASE("valid day thresholds") {
  auto d = testing::covered_day(6, 20);
  CHECK(d.coverage_hours == doctest::Approx(14.0));
  CHECK(is_valid_day(d));
  auto short_day = testing::covered_day(6, 19.9 + 1e-9);
  CHECK(short_day.coverage_hours < 14.0);
  CHECK_FALSE(is_valid_day(short_day));
  auto travel = testing::covered_day(6, 24);
  travel.multi_timezone = true;
  CHECK_FALSE(is_valid_day(travel));
}

TEST_CASE("partition assigns records to local days") {
  const auto m = two_day_manifest();
  const TimestampMs d1 = local_midnight_utc(m.days[0].date, -300);
  EventStreams s;
  s.unlocks = {{d1 + 25 * kMsPerHour, 5}, {d1 + kMsPerHour, 3}};
  s.heartbeat = {{d1, d1 + 24 * kMsPerHour}};
  s.activity = {{ActivityKind::walking, d1 + 23 * kMsPerHour, d1 + 25 * kMsPerHour}};
  const auto days = partition_days(m, s);
  REQUIRE(days.size() == 2);
  CHECK(days[0].streams.unlocks.size() == 1);
  CHECK(days[1].streams.unlocks.size() == 1);
  CHECK(days[0].streams.activity.size() == 1);  // by start
  CHECK(days[0].coverage_hours == doctest::Approx(18.0));
  CHECK_FALSE(days[0].multi_timezone);

  EventStreams stray;
  stray.unlocks = {{d1 + 49 * kMsPerHour, 1}};
  CHECK_THROWS_WITH_AS(partition_days(m, stray), doctest::Contains("outside every manifest day"), Error);
}

TEST_CASE("two offsets on one date mark a multi-timezone day") {
  auto m = two_day_manifest();
  m.days.push_back({parse_date("2024-05-02"), -240});
  const auto days = partition_days(m, {});
  REQUIRE(days.size() == 2);
  CHECK_FALSE(days[0].multi_timezone);
  CHECK(days[1].multi_timezone);
}

TEST_CASE("record order does not change partitioning") {
  const auto m = two_day_manifest();
  const TimestampMs d1 = local_midnight_utc(m.days[0].date, -300);
  EventStreams a;
  a.steps = {{d1 + 1000, 1, 0.7}, {d1 + 3000, 3, 2.1}, {d1 + 2000, 2, 1.4}};
  EventStreams b = a;
  std::reverse(b.steps.begin(), b.steps.end());
  const auto da = partition_days(m, a), db = partition_days(m, b);
  REQUIRE(da[0].streams.steps.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(da[0].streams.steps[i].t == db[0].streams.steps[i].t);
    CHECK(da[0].streams.steps[i].cumulative_steps == static_cast<std::int64_t>(i + 1));
  }
}

TEST_CASE("files round trip") {
  TempDir tmp("ingest");
  const auto m = two_day_manifest();
  const TimestampMs d1 = local_midnight_utc(m.days[0].date, -300);
  EventStreams s;
  s.location = {{d1 + kMsPerHour, 30.1, -97.7, 12.0, 1.5}, {d1 + 2 * kMsPerHour, 30.1, -97.7, 8.0, std::nullopt}};
  s.steps = {{d1 + 3 * kMsPerHour, 12, 8.5}};
  s.activity = {{ActivityKind::cycling, d1 + 4 * kMsPerHour, d1 + 5 * kMsPerHour}};
  GaitDailyMetrics g;
  g.t = d1 + 20 * kMsPerHour;
  g.walking_speed = MinAvgMax{0.9, 1.0, 1.2};
  s.gait = {g};
  s.unlocks = {{d1 + 6 * kMsPerHour, 30}};
  s.app_usage = {{d1 + 6 * kMsPerHour, "news", 20}};
  TypingSession t{d1 + 7 * kMsPerHour, d1 + 7 * kMsPerHour + 5000, Orientation::portrait, 2, 3, 1, 0, 0, 1, {}};
  t.keystrokes = {{t.start + 100, t.start + 180, KeyClass::character, 0.25},
                  {t.start + 300, t.start + 360, KeyClass::del, std::nullopt}};
  s.typing = {t};
  s.comm = {{CommKind::call, CommDirection::outgoing, d1 + 8 * kMsPerHour, 60.0, "abc"},
            {CommKind::message, CommDirection::incoming, d1 + 9 * kMsPerHour, std::nullopt, "def"}};
  s.heartbeat = {{d1, d1 + 48 * kMsPerHour}};

  const auto dir = tmp.path() / "A01";
  std::filesystem::create_directories(dir);
  write_manifest(dir / "manifest.json", m);
  write_streams(dir, s);

  const auto back = read_streams(dir);
  CHECK(back.counts() == s.counts());
  CHECK(back.location[1].speed_mps == std::nullopt);
  CHECK(*back.location[0].speed_mps == 1.5);
  CHECK(back.typing[0].keystrokes[1].key_class == KeyClass::del);
  CHECK(back.gait[0].step_length == std::nullopt);
  CHECK(back.comm[0].contact_hash == "abc");

  const auto p = load_participant(dir);
  CHECK(p.id == "A01");
  CHECK(p.label == 1);
  CHECK(p.demographics.education == 16);
  REQUIRE(p.days.size() == 2);
  CHECK(merge_days(p.days).counts() == s.counts());

  const auto cohort = load_cohort(tmp.path());
  CHECK(cohort.size() == 1);
}

TEST_CASE("empty participant") {
  TempDir tmp("empty");
  Manifest m = two_day_manifest();
  m.days.clear();
  write_manifest(tmp.path() / "manifest.json", m);
  const auto p = load_participant(tmp.path());
  CHECK(p.days.empty());
}

TEST_CASE("ingest errors") {
  TempDir tmp("errors");
  CHECK_THROWS_WITH_AS(load_participant(tmp.path()), doctest::Contains("manifest.json"), Error);
  CHECK_THROWS_WITH_AS(load_cohort(tmp.path() / "nope"), doctest::Contains("nope"), Error);

  write_manifest(tmp.path() / "manifest.json", two_day_manifest());
  {
    std::ofstream out(tmp.path() / "steps.jsonl");
    out << R"({"t": 1, "cumulative_steps": 1, "cumulative_distance_m": 0.5})" << '\n';
    out << R"({"t": "late", "cumulative_steps": 2, "cumulative_distance_m": 1})" << '\n';
  }
  CHECK_THROWS_WITH_AS(read_streams(tmp.path()), doctest::Contains("steps.jsonl:2"), Error);

  std::filesystem::remove(tmp.path() / "steps.jsonl");
  {
    std::ofstream out(tmp.path() / "gait.jsonl");
    out << R"({"t": 1, "walking_speed": {"min": 1.2, "avg": 1.0, "max": 1.3}})" << '\n';
  }
  CHECK_THROWS_WITH_AS(read_streams(tmp.path()), doctest::Contains("gait.jsonl:1"), Error);
  std::filesystem::remove(tmp.path() / "gait.jsonl");
  {
    std::ofstream out(tmp.path() / "usage.jsonl");
    out << R"({"type": "screen", "t": 1, "duration_s": 3})" << '\n';
  }
  CHECK_THROWS_WITH_AS(read_streams(tmp.path()), doctest::Contains("usage.jsonl:1"), Error);
}
