#include "cogsense/augment.hpp"

#include <algorithm>
#include <numeric>

#include "cogsense/distribution.hpp"

namespace cogsense {

Matrix pairwise_distances(const Matrix& v) {
  const Eigen::Index n = v.rows();
  Matrix d = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double dist = (v.row(i) - v.row(j)).norm();
      d(i, j) = dist;
      d(j, i) = dist;
    }
  }
  return d;
}

ReplacementIndex build_replacement_index(const Matrix& vectors, const AugmentConfig& config) {
  ReplacementIndex idx;
  const auto n = static_cast<std::size_t>(vectors.rows());
  idx.distances = pairwise_distances(vectors);
  idx.candidates.assign(n, {});
  if (n < 2) return idx;

  std::vector<double> upper;
  upper.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      upper.push_back(idx.distances(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
  }
  idx.tau = percentile(upper, config.tau_percentile);

  std::vector<int> order;
  for (std::size_t i = 0; i < n; ++i) {
    order.resize(n);
    std::iota(order.begin(), order.end(), 0);
    order.erase(order.begin() + static_cast<std::ptrdiff_t>(i));
    const auto row = idx.distances.row(static_cast<Eigen::Index>(i));
    const std::size_t k = std::min(config.neighbors, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](int a, int b) { return row[a] < row[b] || (row[a] == row[b] && a < b); });
    for (std::size_t c = 0; c < k; ++c) {
      if (row[order[c]] < idx.tau) idx.candidates[i].push_back(order[c]);
    }
  }
  return idx;
}

DayPool build_day_pool(const ParticipantSeries& series, const StandardizationStats& stats,
                       std::span<const std::size_t> sensing_columns, const AugmentConfig& config) {
  DayPool pool;
  pool.participant_id = series.id;
  pool.rows = standardize_days(series, stats);
  Matrix sensing(pool.rows.rows(), static_cast<Eigen::Index>(sensing_columns.size()));
  for (std::size_t c = 0; c < sensing_columns.size(); ++c) {
    sensing.col(static_cast<Eigen::Index>(c)) =
        pool.rows.col(static_cast<Eigen::Index>(sensing_columns[c]));
  }
  pool.index = build_replacement_index(sensing, config);
  return pool;
}

SequenceSample synthesize_sequence(const SequenceSample& sample, const DayPool& pool, Rng& rng) {
  if (sample.is_synthetic) throw Error("cannot synthesize from a synthetic sequence");
  if (sample.participant_id != pool.participant_id) {
    throw Error("day pool of " + pool.participant_id + " used for " + sample.participant_id);
  }
  SequenceSample out = sample;
  out.is_synthetic = true;
  for (std::size_t t = 0; t < sample.row_sources.size(); ++t) {
    const int day = sample.row_sources[t];
    if (day < 0 || !sample.valid_mask[t]) continue;
    const auto& cands = pool.index.candidates.at(static_cast<std::size_t>(day));
    if (cands.empty()) continue;
    std::uniform_int_distribution<std::size_t> pick(0, cands.size() - 1);
    const int replacement = cands[pick(rng)];
    out.row_sources[t] = replacement;
    out.x.row(static_cast<Eigen::Index>(t)).head(pool.rows.cols()) = pool.rows.row(replacement);
  }
  return out;
}

std::vector<SequenceSample> augment_training_set(const std::vector<SequenceSample>& samples,
                                                 std::span<const DayPool> pools, std::size_t k,
                                                 std::uint64_t seed) {
  std::vector<SequenceSample> out;
  out.reserve(samples.size() * (k + 1));
  out.insert(out.end(), samples.begin(), samples.end());
  if (k == 0) return out;
  for (const auto& s : samples) {
    auto pool = std::find_if(pools.begin(), pools.end(),
                             [&](const DayPool& p) { return p.participant_id == s.participant_id; });
    if (pool == pools.end()) throw Error("no day pool for participant " + s.participant_id);
    for (std::size_t r = 0; r < k; ++r) {
      Rng rng(derive_seed(seed, {hash_string(s.participant_id),
                                 static_cast<std::uint64_t>(s.window_start.time_since_epoch().count()),
                                 r}));
      out.push_back(synthesize_sequence(s, *pool, rng));
    }
  }
  return out;
}

}  // namespace cogsense
