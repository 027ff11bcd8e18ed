#include "cogsense/dataset.hpp"

#include <charconv>
#include <fstream>
#include <map>

#include "cogsense/parallel.hpp"

namespace cogsense {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_cell(const std::string& cell, const std::string& where) {
  if (cell.empty()) return kMissing;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
    throw Error(where + ": not a number: '" + cell + "'");
  }
  return v;
}

std::ofstream open_out(const fs::path& file) {
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file.string());
  return out;
}

}  // namespace

std::string format_number(double v) {
  if (is_missing(v)) return {};
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::vector<ParticipantSeries> featurize_cohort(const std::vector<Participant>& participants,
                                                const FeatureConfig& config, std::size_t jobs) {
  // Flatten (participant, day) so the work spreads evenly.
  std::vector<std::pair<std::size_t, std::size_t>> items;
  for (std::size_t p = 0; p < participants.size(); ++p) {
    for (std::size_t d = 0; d < participants[p].days.size(); ++d) {
      if (is_valid_day(participants[p].days[d], config.coverage)) items.emplace_back(p, d);
    }
  }
  std::vector<DayRecord> records(items.size());
  parallel_for(items.size(), jobs, [&](std::size_t i) {
    const auto& day = participants[items[i].first].days[items[i].second];
    records[i] = DayRecord{day.day.date, featurize_day(day, config)};
  });

  std::vector<ParticipantSeries> out(participants.size());
  for (std::size_t p = 0; p < participants.size(); ++p) {
    out[p].id = participants[p].id;
    out[p].label = participants[p].label;
    out[p].demographics = participants[p].demographics;
  }
  for (std::size_t i = 0; i < items.size(); ++i) {
    out[items[i].first].days.push_back(std::move(records[i]));
  }
  return out;
}

void write_feature_table(const fs::path& dir, const std::vector<ParticipantSeries>& series,
                         const FeatureRegistry& registry) {
  fs::create_directories(dir);
  auto out = open_out(dir / "features.csv");
  out << "participant_id,date";
  for (const auto& spec : registry.specs()) out << ',' << spec.name;
  out << '\n';
  for (const auto& s : series) {
    for (const auto& d : s.days) {
      if (d.values.size() != registry.size()) {
        throw Error("participant " + s.id + " day " + format_date(d.date) + " has " +
                    std::to_string(d.values.size()) + " values, registry has " +
                    std::to_string(registry.size()));
      }
      out << s.id << ',' << format_date(d.date);
      for (double v : d.values) out << ',' << format_number(v);
      out << '\n';
    }
  }

  auto people = open_out(dir / "participants.csv");
  people << "participant_id,label,age,sex,education\n";
  for (const auto& s : series) {
    people << s.id << ',' << s.label << ',' << format_number(s.demographics.age) << ','
           << to_string(s.demographics.sex) << ',' << format_number(s.demographics.education) << '\n';
  }
  registry.write_csv(dir / "registry.csv");
}

std::vector<ParticipantSeries> read_feature_table(const fs::path& dir, const FeatureRegistry& registry) {
  const fs::path people_file = dir / "participants.csv";
  std::ifstream people(people_file);
  if (!people) throw Error("cannot read " + people_file.string());
  std::string line;
  std::getline(people, line);
  if (line != "participant_id,label,age,sex,education") {
    throw Error(people_file.string() + ":1: unexpected header");
  }
  std::vector<ParticipantSeries> out;
  std::map<std::string, std::size_t, std::less<>> index;
  std::size_t line_no = 1;
  while (std::getline(people, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = people_file.string() + ":" + std::to_string(line_no);
    const auto cells = split_csv(line);
    if (cells.size() != 5) throw Error(where + ": expected 5 columns");
    ParticipantSeries s;
    s.id = cells[0];
    const double label = parse_cell(cells[1], where);
    if (label != 0.0 && label != 1.0) throw Error(where + ": label must be 0 or 1");
    s.label = static_cast<int>(label);
    s.demographics.age = parse_cell(cells[2], where);
    s.demographics.sex = parse_sex(cells[3]);
    s.demographics.education = parse_cell(cells[4], where);
    if (!index.emplace(s.id, out.size()).second) throw Error(where + ": duplicate participant " + s.id);
    out.push_back(std::move(s));
  }

  const fs::path feature_file = dir / "features.csv";
  std::ifstream in(feature_file);
  if (!in) throw Error("cannot read " + feature_file.string());
  std::getline(in, line);
  const auto header = split_csv(line);
  bool header_ok = header.size() == registry.size() + 2 && header[0] == "participant_id" &&
                   header[1] == "date";
  for (std::size_t f = 0; header_ok && f < registry.size(); ++f) {
    header_ok = header[f + 2] == registry[f].name;
  }
  if (!header_ok) throw Error(feature_file.string() + ":1: header does not match the feature registry");
  line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = feature_file.string() + ":" + std::to_string(line_no);
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) throw Error(where + ": wrong column count");
    auto it = index.find(cells[0]);
    if (it == index.end()) throw Error(where + ": participant " + cells[0] + " not in participants.csv");
    DayRecord rec;
    rec.date = parse_date(cells[1]);
    rec.values.reserve(registry.size());
    for (std::size_t f = 0; f < registry.size(); ++f) rec.values.push_back(parse_cell(cells[f + 2], where));
    auto& days = out[it->second].days;
    if (!days.empty() && days.back().date >= rec.date) throw Error(where + ": dates must increase");
    days.push_back(std::move(rec));
  }
  return out;
}

void write_sequence_index(const fs::path& file, const Cohort& cohort) {
  auto out = open_out(file);
  out << "sample_index,participant_id,label,window_start,valid_days,mask\n";
  std::size_t k = 0;
  for (std::size_t p = 0; p < cohort.participants.size(); ++p) {
    const auto& s = cohort.participants[p];
    for (const auto& w : cohort.windows[p]) {
      out << k++ << ',' << s.id << ',' << s.label << ',' << format_date(w.start) << ','
          << w.valid_count() << ',';
      for (int r : w.rows) out << (r >= 0 ? '1' : '0');
      out << '\n';
    }
  }
}

void write_standardization(const fs::path& file, const StandardizationStats& stats,
                           const FeatureRegistry& registry) {
  auto out = open_out(file);
  out << "feature,mean,std,constant\n";
  for (std::size_t f = 0; f < stats.size(); ++f) {
    out << (f < registry.size() ? registry[f].name : "column_" + std::to_string(f)) << ','
        << format_number(stats.mean[f]) << ',' << format_number(stats.stddev[f]) << ','
        << (stats.constant[f] ? 1 : 0) << '\n';
  }
}

}  // namespace cogsense
