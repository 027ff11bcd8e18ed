#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "cogsense/ingest.hpp"

namespace testing {

using namespace cogsense;

/// A day of the given date at UTC-5 with heartbeat covering [from_h, to_h).
inline SensorDay covered_day(double from_h = 0.0, double to_h = 24.0, const char* date = "2024-05-01",
                             int offset = -300) {
  SensorDay s;
  s.day = make_local_day("T1", parse_date(date), offset);
  const auto at = [&](double h) { return s.day.day_start + static_cast<TimestampMs>(h * kMsPerHour); };
  if (to_h > from_h) s.streams.heartbeat.push_back({at(from_h), at(to_h)});
  s.coverage_hours = compute_coverage(s);
  return s;
}

inline TimestampMs at(const SensorDay& d, double hours) {
  return d.day.day_start + static_cast<TimestampMs>(std::llround(hours * kMsPerHour));
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("cogsense-" + tag + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing
