#include "cogsense/sequence.hpp"

#include <algorithm>
#include <map>

namespace cogsense {

std::size_t RawWindow::valid_count() const {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](int r) { return r >= 0; }));
}

std::vector<RawWindow> build_windows(const ParticipantSeries& series, const WindowConfig& config) {
  std::vector<RawWindow> out;
  if (series.days.empty() || config.length_days == 0) return out;
  std::map<Date, int> by_date;
  for (std::size_t i = 0; i < series.days.size(); ++i) {
    by_date[series.days[i].date] = static_cast<int>(i);
  }
  const Date first = by_date.begin()->first;
  const Date last = by_date.rbegin()->first;
  const auto span_days = static_cast<std::size_t>((last - first).count()) + 1;
  if (span_days < config.length_days) return out;

  for (Date start = first; start + std::chrono::days(config.length_days - 1) <= last;
       start += std::chrono::days{1}) {
    RawWindow w;
    w.start = start;
    w.rows.resize(config.length_days, -1);
    for (std::size_t k = 0; k < config.length_days; ++k) {
      auto it = by_date.find(start + std::chrono::days(k));
      if (it != by_date.end()) w.rows[k] = it->second;
    }
    if (w.valid_count() >= config.min_valid_days) out.push_back(std::move(w));
  }
  return out;
}

std::size_t Cohort::window_count() const {
  std::size_t n = 0;
  for (const auto& w : windows) n += w.size();
  return n;
}

std::size_t Cohort::index_of(std::string_view participant_id) const {
  for (std::size_t i = 0; i < participants.size(); ++i) {
    if (participants[i].id == participant_id) return i;
  }
  throw Error("participant '" + std::string(participant_id) + "' not in cohort");
}

Cohort retain_participants(std::vector<ParticipantSeries> series, const WindowConfig& config) {
  Cohort cohort;
  for (auto& s : series) {
    auto windows = build_windows(s, config);
    if (windows.size() < config.min_windows_per_participant || windows.empty()) continue;
    cohort.participants.push_back(std::move(s));
    cohort.windows.push_back(std::move(windows));
  }
  return cohort;
}

StandardizationStats fit_standardization(std::span<const ParticipantSeries> participants,
                                         std::span<const std::size_t> members) {
  std::size_t width = 0;
  for (auto m : members) {
    for (const auto& d : participants[m].days) {
      width = std::max(width, d.values.size());
    }
  }
  if (width == 0) throw Error("cannot fit standardization on an empty training set");

  StandardizationStats st;
  st.mean.assign(width, 0.0);
  st.stddev.assign(width, 0.0);
  st.constant.assign(width, true);
  std::vector<double> count(width, 0.0);
  for (auto m : members) {
    st.contributors.push_back(participants[m].id);
    for (const auto& d : participants[m].days) {
      for (std::size_t f = 0; f < d.values.size(); ++f) {
        if (is_missing(d.values[f])) continue;
        st.mean[f] += d.values[f];
        count[f] += 1.0;
      }
    }
  }
  for (std::size_t f = 0; f < width; ++f) {
    if (count[f] > 0.0) st.mean[f] /= count[f];
  }
  for (auto m : members) {
    for (const auto& d : participants[m].days) {
      for (std::size_t f = 0; f < d.values.size(); ++f) {
        if (is_missing(d.values[f])) continue;
        const double dv = d.values[f] - st.mean[f];
        st.stddev[f] += dv * dv;
      }
    }
  }
  for (std::size_t f = 0; f < width; ++f) {
    st.stddev[f] = count[f] > 0.0 ? std::sqrt(st.stddev[f] / count[f]) : 0.0;
    st.constant[f] = !(st.stddev[f] > 0.0);
  }
  return st;
}

Eigen::RowVectorXd standardize_day(std::span<const double> values, const StandardizationStats& stats) {
  Eigen::RowVectorXd z = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(stats.size()));
  for (std::size_t f = 0; f < stats.size() && f < values.size(); ++f) {
    if (is_missing(values[f]) || stats.constant[f]) continue;
    z[static_cast<Eigen::Index>(f)] = (values[f] - stats.mean[f]) / stats.stddev[f];
  }
  return z;
}

std::vector<double> destandardize_day(const Eigen::RowVectorXd& z, const StandardizationStats& stats) {
  std::vector<double> v(stats.size());
  for (std::size_t f = 0; f < stats.size(); ++f) {
    v[f] = stats.mean[f] + z[static_cast<Eigen::Index>(f)] * stats.stddev[f];
  }
  return v;
}

SequenceSample standardize_impute(const RawWindow& window, const ParticipantSeries& series,
                                  const StandardizationStats& stats) {
  SequenceSample s;
  s.participant_id = series.id;
  s.window_start = window.start;
  s.label = series.label;
  s.row_sources = window.rows;
  s.valid_mask.resize(window.rows.size());
  s.x = Matrix::Zero(static_cast<Eigen::Index>(window.rows.size()),
                     static_cast<Eigen::Index>(stats.size()));
  for (std::size_t t = 0; t < window.rows.size(); ++t) {
    const int r = window.rows[t];
    s.valid_mask[t] = r >= 0;
    if (r < 0) continue;
    s.x.row(static_cast<Eigen::Index>(t)) =
        standardize_day(series.days[static_cast<std::size_t>(r)].values, stats);
  }
  return s;
}

Matrix standardize_days(const ParticipantSeries& series, const StandardizationStats& stats) {
  Matrix m(static_cast<Eigen::Index>(series.days.size()), static_cast<Eigen::Index>(stats.size()));
  for (std::size_t i = 0; i < series.days.size(); ++i) {
    m.row(static_cast<Eigen::Index>(i)) = standardize_day(series.days[i].values, stats);
  }
  return m;
}

DemographicStats fit_demographics(std::span<const ParticipantSeries> participants,
                                  std::span<const std::size_t> members) {
  if (members.empty()) throw Error("cannot fit demographic statistics on an empty set");
  DemographicStats st;
  const auto n = static_cast<double>(members.size());
  for (auto m : members) {
    st.contributors.push_back(participants[m].id);
    const auto v = participants[m].demographics.as_vector();
    for (std::size_t k = 0; k < 3; ++k) st.mean[k] += v[k] / n;
  }
  for (auto m : members) {
    const auto v = participants[m].demographics.as_vector();
    for (std::size_t k = 0; k < 3; ++k) st.stddev[k] += (v[k] - st.mean[k]) * (v[k] - st.mean[k]) / n;
  }
  for (auto& s : st.stddev) s = std::sqrt(s);
  return st;
}

std::array<double, 3> standardize_demographics(const DemographicProfile& profile,
                                               const DemographicStats& stats) {
  const auto v = profile.as_vector();
  std::array<double, 3> z{};
  for (std::size_t k = 0; k < 3; ++k) {
    z[k] = stats.stddev[k] > 0.0 ? (v[k] - stats.mean[k]) / stats.stddev[k] : 0.0;
  }
  return z;
}

SequenceSample fuse_demographics(const SequenceSample& sample, const DemographicProfile& profile,
                                 const DemographicStats& stats) {
  SequenceSample out = sample;
  const auto z = standardize_demographics(profile, stats);
  const Eigen::Index w = sample.x.cols();
  out.x.conservativeResize(Eigen::NoChange, w + 3);
  for (Eigen::Index t = 0; t < out.x.rows(); ++t) {
    for (Eigen::Index k = 0; k < 3; ++k) out.x(t, w + k) = z[static_cast<std::size_t>(k)];
  }
  return out;
}

std::vector<double> window_summary_stats(const RawWindow& window, const ParticipantSeries& series) {
  std::size_t width = 0;
  for (int r : window.rows) {
    if (r >= 0) width = std::max(width, series.days[static_cast<std::size_t>(r)].values.size());
  }
  std::vector<double> out(4 * width, kMissing);
  for (std::size_t f = 0; f < width; ++f) {
    double sum = 0.0, lo = 0.0, hi = 0.0;
    std::size_t n = 0;
    for (int r : window.rows) {
      if (r < 0) continue;
      const double v = series.days[static_cast<std::size_t>(r)].values[f];
      if (is_missing(v)) continue;
      lo = n == 0 ? v : std::min(lo, v);
      hi = n == 0 ? v : std::max(hi, v);
      sum += v;
      ++n;
    }
    if (n == 0) continue;
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (int r : window.rows) {
      if (r < 0) continue;
      const double v = series.days[static_cast<std::size_t>(r)].values[f];
      if (!is_missing(v)) ss += (v - mean) * (v - mean);
    }
    out[f] = mean;
    out[width + f] = std::sqrt(ss / static_cast<double>(n));
    out[2 * width + f] = lo;
    out[3 * width + f] = hi;
  }
  return out;
}

}  // namespace cogsense
