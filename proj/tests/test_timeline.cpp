#include <doctest.h>

#include <random>

#include "cogsense/timeline.hpp"

using namespace cogsense;

TEST_CASE("haversine distance") {
  CHECK(haversine_m({0, 0}, {0, 0}) == 0.0);
  // One degree of longitude on the equator is R * pi / 180.
  const double arc = kEarthRadiusM * std::numbers::pi / 180.0;
  CHECK(haversine_m({0, 0}, {0, 1}) == doctest::Approx(111195.0).epsilon(0.005));
  CHECK(haversine_m({0, 0}, {0, 1}) == doctest::Approx(arc).epsilon(1e-12));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lat(-89, 89), lon(-180, 180);
  for (int i = 0; i < 200; ++i) {
    const LatLon a{lat(rng), lon(rng)}, b{lat(rng), lon(rng)};
    CHECK(haversine_m(a, b) == doctest::Approx(haversine_m(b, a)).epsilon(1e-12));
  }
  // Antipodes stay finite.
  CHECK(haversine_m({0, 0}, {0, 180}) == doctest::Approx(std::numbers::pi * kEarthRadiusM));
}

TEST_CASE("local clock fraction") {
  const auto day = make_local_day("p", parse_date("2024-03-05"), -360);
  CHECK(local_clock_fraction(day.day_start, day) == 0.0);
  CHECK(local_clock_fraction(day.day_start + 6 * kMsPerHour, day) == 6.0);
  CHECK(local_clock_fraction(day.day_start + 14 * kMsPerHour + 30 * kMsPerMinute, day) == 14.5);
  CHECK_THROWS_AS(local_clock_fraction(day.day_start - 1, day), Error);
  CHECK_THROWS_AS(local_clock_fraction(day.day_end, day), Error);
}

TEST_CASE("local days") {
  const Date d = parse_date("2024-03-09");
  CHECK(format_date(d) == "2024-03-09");
  CHECK_THROWS_AS(parse_date("2024-02-30"), Error);
  CHECK_THROWS_AS(parse_date("yesterday"), Error);

  // UTC-6 midnight is 06:00 UTC.
  CHECK(local_midnight_utc(d, -360) == date_to_utc_ms(d) + 6 * kMsPerHour);

  const auto plain = make_local_day("p", d, -360);
  CHECK(plain.length_hours() == 24.0);
  // Next day one hour ahead (spring forward): the day is 23 h long.
  const auto dst = make_local_day("p", d, -360, -300);
  CHECK(dst.length_hours() == 23.0);
  CHECK(dst.contains(dst.day_start));
  CHECK_FALSE(dst.contains(dst.day_end));
}

TEST_CASE("enum round trips") {
  for (auto k : {ActivityKind::walking, ActivityKind::running, ActivityKind::cycling, ActivityKind::automotive}) {
    CHECK(parse_activity_kind(to_string(k)) == k);
  }
  CHECK(parse_key_class("delete") == KeyClass::del);
  CHECK(parse_sex(to_string(Sex::male)) == Sex::male);
  CHECK_THROWS_AS(parse_comm_kind("fax"), Error);
  CHECK_THROWS_AS(parse_orientation("diagonal"), Error);
}

TEST_CASE("demographic vector") {
  DemographicProfile p{72, Sex::male, 16};
  const auto v = p.as_vector();
  CHECK(v[0] == 72);
  CHECK(v[1] == 1);
  CHECK(v[2] == 16);
  CHECK(DemographicProfile{70, Sex::female, 12}.as_vector()[1] == 0);
}
