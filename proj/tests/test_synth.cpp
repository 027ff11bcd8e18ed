#include <doctest.h>

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cogsense/features.hpp"
#include "cogsense/synth.hpp"
#include "support.hpp"

using namespace cogsense;
using nlohmann::json;

namespace {

CohortSpec small_spec() {
  CohortSpec s;
  s.participants = 6;
  s.days = 12;
  s.invalid_day_rate = 0.2;
  s.travel_day_rate = 0.15;
  s.seed = 77;
  return s;
}

std::string slurp(const std::filesystem::path& f) {
  std::ifstream in(f, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double mean_hold_ms(const EventStreams& s) {
  double sum = 0.0, n = 0.0;
  for (const auto& t : s.typing) {
    for (const auto& k : t.keystrokes) {
      if (k.key_class != KeyClass::character) continue;
      sum += static_cast<double>(k.t_up - k.t_down);
      n += 1.0;
    }
  }
  return sum / n;
}

}  // namespace

TEST_CASE("ledger counts equal re-ingested counts") {
  testing::TempDir dir("synth");
  const auto spec = small_spec();
  generate_cohort(spec, dir.path(), 2);
  const json ledger = json::parse(slurp(dir.path() / "ledger.json"));
  const auto cohort = load_cohort(dir.path());
  REQUIRE(cohort.size() == spec.participants);
  REQUIRE(ledger.at("participants").size() == spec.participants);

  std::size_t low_total = 0, travel_total = 0;
  for (std::size_t i = 0; i < cohort.size(); ++i) {
    const auto& entry = ledger["participants"][i];
    const auto& p = cohort[i];
    CHECK(entry["participant_id"] == p.id);
    CHECK(entry["label"] == p.label);
    const auto counts = merge_days(p.days).counts();
    for (std::size_t k = 0; k < kStreamNames.size(); ++k) {
      CHECK(entry["counts"][std::string(kStreamNames[k])].get<std::size_t>() == counts[k]);
    }
    CHECK(p.days.size() == spec.days);

    for (const auto& d : entry["low_coverage_days"]) {
      const Date date = parse_date(d.get<std::string>());
      const auto it = std::find_if(p.days.begin(), p.days.end(), [&](const SensorDay& s) { return s.day.date == date; });
      REQUIRE(it != p.days.end());
      CHECK_FALSE(is_valid_day(*it));
      ++low_total;
    }
    for (const auto& d : entry["travel_days"]) {
      const Date date = parse_date(d.get<std::string>());
      const auto it = std::find_if(p.days.begin(), p.days.end(), [&](const SensorDay& s) { return s.day.date == date; });
      REQUIRE(it != p.days.end());
      CHECK(it->multi_timezone);
      ++travel_total;
    }
    // Every other day is valid.
    std::size_t valid = 0;
    for (const auto& d : p.days) valid += is_valid_day(d);
    CHECK(valid + entry["low_coverage_days"].size() + entry["travel_days"].size() >= spec.days);
  }
  CHECK(low_total > 0);
  CHECK(travel_total > 0);
  CHECK(ledger["spec"]["seed"] == spec.seed);
}

TEST_CASE("generation is deterministic and thread-count independent") {
  testing::TempDir a("synth-a"), b("synth-b");
  auto spec = small_spec();
  spec.participants = 3;
  generate_cohort(spec, a.path(), 1);
  generate_cohort(spec, b.path(), 3);
  CHECK(slurp(a.path() / "ledger.json") == slurp(b.path() / "ledger.json"));
  for (const char* f : {"P001/typing.jsonl", "P002/location.jsonl", "P003/manifest.json"}) {
    CHECK(slurp(a.path() / f) == slurp(b.path() / f));
  }
  spec.seed += 1;
  CHECK(generate_participant(spec, 0).streams.counts() != generate_participant(small_spec(), 0).streams.counts());
}

TEST_CASE("labels follow the impaired fraction") {
  CohortSpec spec;
  spec.days = 1;
  int impaired = 0;
  for (std::size_t i = 0; i < spec.participants; ++i) impaired += generate_participant(spec, i).manifest.label;
  CHECK(impaired == 12);
  CHECK(generate_participant(spec, 0).manifest.participant_id == "P001");
  CHECK(generate_participant(spec, 35).manifest.participant_id == "P036");
}

TEST_CASE("planted effects shift the impaired group") {
  CohortSpec spec;
  spec.participants = 12;
  spec.days = 8;
  spec.invalid_day_rate = 0.0;
  spec.travel_day_rate = 0.0;
  auto zero = spec;
  zero.effects = {0.0, 1.0, 0.0, 0.0};
  CHECK(zero.effects.none());
  CHECK_FALSE(spec.effects.none());

  // Same participants with and without the effects: the difference is the effect.
  for (std::size_t i = 0; i < spec.participants; ++i) {
    const auto with = generate_participant(spec, i);
    const auto without = generate_participant(zero, i);
    CHECK(with.manifest.label == without.manifest.label);
    if (with.manifest.label == 0) {
      CHECK(with.streams.counts() == without.streams.counts());
      CHECK(with.manifest.demographics.education == without.manifest.demographics.education);
      continue;
    }
    CHECK(with.manifest.demographics.education == without.manifest.demographics.education + 2.0);
    CHECK(mean_hold_ms(with.streams) - mean_hold_ms(without.streams) == doctest::Approx(30.0).epsilon(0.2));
    const double extra_unlocks = static_cast<double>(with.streams.unlocks.size()) -
                                 static_cast<double>(without.streams.unlocks.size());
    CHECK(extra_unlocks / spec.days == doctest::Approx(20.0).epsilon(0.35));
  }
}

TEST_CASE("cohort spec files") {
  const auto spec = small_spec();
  const auto back = cohort_spec_from_json_text(cohort_spec_to_json_text(spec));
  CHECK(cohort_spec_to_json_text(back) == cohort_spec_to_json_text(spec));
  CHECK(cohort_spec_from_json_text("{}").participants == 36);
  CHECK(cohort_spec_from_json_text(R"({"effects": {"unlock_count": 5}})").effects.key_hold_ms == 30.0);
  CHECK_THROWS_WITH_AS(cohort_spec_from_json_text(R"({"participnts": 3})"), doctest::Contains("participnts"), Error);
  CHECK_THROWS_AS(cohort_spec_from_json_text(R"({"impaired_fraction": 1.0})"), Error);
  CHECK_THROWS_AS(cohort_spec_from_json_text(R"({"days": 0})"), Error);
  CHECK_THROWS_AS(cohort_spec_from_json_text(R"({"start_date": "March"})"), Error);
  CHECK_THROWS_AS(cohort_spec_from_json_text("{"), Error);
  CHECK_THROWS_AS(load_cohort_spec("/nonexistent/spec.json"), Error);
}

TEST_CASE("degenerate fixtures") {
  const auto fx = generate_degenerate_fixtures();
  const auto& r = FeatureRegistry::standard();

  REQUIRE(is_valid_day(fx.empty_day));
  const auto empty = featurize_day(fx.empty_day);
  CHECK(empty[r.index_of("steps_total")] == 0);
  CHECK(empty[r.index_of("place_count")] == 0);
  CHECK(is_missing(empty[r.index_of("key_hold_time_mean")]));

  REQUIRE(is_valid_day(fx.single_location_day));
  const auto single = featurize_day(fx.single_location_day);
  CHECK(single[r.index_of("location_total_distance")] == 0);
  CHECK(is_missing(single[r.index_of("location_hull_area")]));

  REQUIRE(fx.multi_timezone.days.size() == 1);
  CHECK(fx.multi_timezone.days[0].multi_timezone);
  CHECK_FALSE(is_valid_day(fx.multi_timezone.days[0]));

  REQUIRE(is_valid_day(fx.landscape_typing_day));
  CHECK(featurize_day(fx.landscape_typing_day)[r.index_of("typing_sessions")] == 0);

  CHECK(build_windows(fx.window_22).empty());
  CHECK(build_windows(fx.window_23).size() == 1);
}
