#include "cogsense/location.hpp"

#include <algorithm>
#include <numbers>
#include <numeric>

#include "cogsense/distribution.hpp"

namespace cogsense {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double cross(const PlanarPoint& o, const PlanarPoint& a, const PlanarPoint& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

}  // namespace

double LocalProjection::x(LatLon p) const {
  return kEarthRadiusM * (p.lon - origin.lon) * kDeg * std::cos(origin.lat * kDeg);
}

double LocalProjection::y(LatLon p) const { return kEarthRadiusM * (p.lat - origin.lat) * kDeg; }

LocalProjection LocalProjection::about_mean(std::span<const LocationSample> samples) {
  LocalProjection proj;
  if (samples.empty()) return proj;
  for (const auto& s : samples) {
    proj.origin.lat += s.lat;
    proj.origin.lon += s.lon;
  }
  proj.origin.lat /= static_cast<double>(samples.size());
  proj.origin.lon /= static_cast<double>(samples.size());
  return proj;
}

std::vector<PlanarPoint> convex_hull(std::vector<PlanarPoint> pts) {
  std::sort(pts.begin(), pts.end(), [](const PlanarPoint& a, const PlanarPoint& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const PlanarPoint& a, const PlanarPoint& b) {
                          return a.x == b.x && a.y == b.y;
                        }),
            pts.end());
  if (pts.size() < 3) return pts;
  std::vector<PlanarPoint> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

double polygon_area(std::span<const PlanarPoint> ring) {
  if (ring.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const auto& a = ring[i];
    const auto& b = ring[(i + 1) % ring.size()];
    twice += a.x * b.y - b.x * a.y;
  }
  return std::abs(twice) / 2.0;
}

double polygon_perimeter(std::span<const PlanarPoint> ring) {
  if (ring.size() < 2) return 0.0;
  double p = 0.0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const auto& a = ring[i];
    const auto& b = ring[(i + 1) % ring.size()];
    p += std::hypot(b.x - a.x, b.y - a.y);
  }
  return p;
}

double gravelius_compactness(double perimeter, double area) {
  if (!(area > 0.0)) return kMissing;
  return perimeter / (2.0 * std::sqrt(std::numbers::pi * area));
}

std::vector<LocationSample> filter_location(std::vector<LocationSample> samples,
                                            const LocationConfig& config) {
  std::stable_sort(samples.begin(), samples.end(),
                   [](const LocationSample& a, const LocationSample& b) { return a.t < b.t; });
  std::vector<LocationSample> kept;
  kept.reserve(samples.size());
  for (const auto& s : samples) {
    if (s.accuracy_m > config.max_accuracy_m) continue;
    double speed = 0.0;
    if (s.speed_mps) {
      speed = *s.speed_mps;
    } else if (!kept.empty()) {
      const double d = haversine_m(kept.back().position(), s.position());
      const double dt = static_cast<double>(s.t - kept.back().t) / kMsPerSecond;
      speed = dt > 0.0 ? d / dt : (d > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    }
    if (speed > config.max_speed_mps) continue;
    kept.push_back(s);
  }
  return kept;
}

std::vector<bool> classify_stationary(std::span<const LocationSample> samples,
                                      const LocationConfig& config) {
  const auto half = static_cast<TimestampMs>(config.stationary_window_s * kMsPerSecond / 2.0);
  std::vector<bool> flags(samples.size(), true);
  std::size_t lo = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    while (samples[lo].t < samples[i].t - half) ++lo;
    double max_d = 0.0;
    for (std::size_t j = lo; j < samples.size() && samples[j].t <= samples[i].t + half; ++j) {
      if (j == i) continue;
      max_d = std::max(max_d, haversine_m(samples[i].position(), samples[j].position()));
    }
    flags[i] = max_d < config.stationary_radius_m;
  }
  return flags;
}

std::vector<double> dwell_seconds(std::span<const LocationSample> samples,
                                  const LocationConfig& config) {
  std::vector<double> dwell(samples.size(), 0.0);
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    const double gap = static_cast<double>(samples[i + 1].t - samples[i].t) / kMsPerSecond;
    dwell[i] = std::min(gap, config.dwell_cap_s);
  }
  return dwell;
}

LocationGeometry location_geometry(std::span<const LocationSample> samples,
                                   const std::vector<bool>& stationary, const LocalDay& day,
                                   const LocationConfig& config) {
  LocationGeometry g;
  if (samples.empty()) return g;

  std::vector<double> lats, lons;
  lats.reserve(samples.size());
  lons.reserve(samples.size());
  for (const auto& s : samples) {
    lats.push_back(s.lat);
    lons.push_back(s.lon);
  }
  g.log_variance =
      std::log(population_variance(lats) + population_variance(lons) + config.variance_epsilon);

  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    g.total_distance_m += haversine_m(samples[i].position(), samples[i + 1].position());
  }

  const auto proj = LocalProjection::about_mean(samples);
  std::vector<PlanarPoint> pts;
  pts.reserve(samples.size());
  for (const auto& s : samples) pts.push_back({proj.x(s.position()), proj.y(s.position())});
  const auto hull = convex_hull(std::move(pts));
  if (hull.size() >= 3) {
    const double area = polygon_area(hull);
    if (area > 0.0) {
      g.hull_area_m2 = area;
      g.hull_perimeter_m = polygon_perimeter(hull);
      g.hull_compactness = gravelius_compactness(g.hull_perimeter_m, area);
    }
  }

  const auto dwell = dwell_seconds(samples, config);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    (stationary[i] ? g.stationary_s : g.moving_s) += dwell[i];
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!stationary[i]) {
      g.first_move_hour = local_clock_fraction(samples[i].t, day);
      break;
    }
  }
  return g;
}

std::vector<int> dbscan(std::span<const PlanarPoint> points, double eps, std::size_t min_points) {
  constexpr int kUnvisited = -2;
  constexpr int kNoise = -1;
  const std::size_t n = points.size();
  std::vector<int> labels(n, kUnvisited);
  const double eps2 = eps * eps;

  // Sort by x so neighbourhood queries scan a narrow band.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return points[a].x < points[b].x || (points[a].x == points[b].x && a < b);
  });
  std::vector<std::size_t> rank(n);
  for (std::size_t r = 0; r < n; ++r) rank[order[r]] = r;

  auto neighbours = [&](std::size_t i) {
    std::vector<std::size_t> out;
    const auto& p = points[i];
    for (std::size_t r = rank[i] + 1; r-- > 0;) {
      const auto& q = points[order[r]];
      if (p.x - q.x > eps) break;
      if ((p.x - q.x) * (p.x - q.x) + (p.y - q.y) * (p.y - q.y) <= eps2) out.push_back(order[r]);
    }
    for (std::size_t r = rank[i] + 1; r < n; ++r) {
      const auto& q = points[order[r]];
      if (q.x - p.x > eps) break;
      if ((p.x - q.x) * (p.x - q.x) + (p.y - q.y) * (p.y - q.y) <= eps2) out.push_back(order[r]);
    }
    std::sort(out.begin(), out.end());
    return out;
  };

  int cluster = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] != kUnvisited) continue;
    auto seeds = neighbours(i);
    if (seeds.size() < min_points) {
      labels[i] = kNoise;
      continue;
    }
    labels[i] = cluster;
    for (std::size_t k = 0; k < seeds.size(); ++k) {
      const std::size_t j = seeds[k];
      if (labels[j] == kNoise) labels[j] = cluster;
      if (labels[j] != kUnvisited) continue;
      labels[j] = cluster;
      auto more = neighbours(j);
      if (more.size() >= min_points) seeds.insert(seeds.end(), more.begin(), more.end());
    }
    ++cluster;
  }
  return labels;
}

std::vector<PlaceCluster> cluster_places(std::span<const LocationSample> samples,
                                         const std::vector<bool>& stationary,
                                         const LocalDay& day, const LocationConfig& config) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (stationary[i]) idx.push_back(i);
  }
  if (idx.empty()) return {};

  const auto proj = LocalProjection::about_mean(samples);
  std::vector<PlanarPoint> pts;
  pts.reserve(idx.size());
  for (auto i : idx) pts.push_back({proj.x(samples[i].position()), proj.y(samples[i].position())});
  const auto labels = dbscan(pts, config.dbscan_eps_m, config.dbscan_min_points);
  const int count = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  if (count <= 0) return {};

  const auto dwell = dwell_seconds(samples, config);
  const TimestampMs night_end = day.day_start + 6 * kMsPerHour;
  std::vector<PlaceCluster> clusters(static_cast<std::size_t>(count));
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (labels[k] < 0) continue;
    const std::size_t i = idx[k];
    auto& c = clusters[static_cast<std::size_t>(labels[k])];
    c.members.push_back(i);
    c.centroid.lat += samples[i].lat;
    c.centroid.lon += samples[i].lon;
    c.dwell_s += dwell[i];
    const TimestampMs a = samples[i].t;
    const TimestampMs b = a + static_cast<TimestampMs>(dwell[i] * kMsPerSecond);
    const TimestampMs overlap = std::min(b, night_end) - std::max(a, day.day_start);
    if (overlap > 0) c.night_dwell_s += static_cast<double>(overlap) / kMsPerSecond;
  }
  std::size_t home = clusters.size();
  double best = 0.0;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    auto& cl = clusters[c];
    cl.centroid.lat /= static_cast<double>(cl.members.size());
    cl.centroid.lon /= static_cast<double>(cl.members.size());
    if (cl.night_dwell_s > best) {
      best = cl.night_dwell_s;
      home = c;
    }
  }
  if (home < clusters.size()) clusters[home].is_home = true;
  return clusters;
}

PlaceFeatures place_features(std::span<const PlaceCluster> clusters,
                             std::span<const LocationSample> samples, const LocalDay& day) {
  PlaceFeatures f;
  f.cluster_count = static_cast<double>(clusters.size());
  if (clusters.empty()) return f;

  const PlaceCluster* home = nullptr;
  for (const auto& c : clusters) {
    f.cluster_dwell_s += c.dwell_s;
    if (c.is_home) home = &c;
  }
  if (home) f.home_dwell_s = home->dwell_s;

  if (clusters.size() >= 2) {
    double max_pair = 0.0;
    for (std::size_t a = 0; a < clusters.size(); ++a) {
      for (std::size_t b = a + 1; b < clusters.size(); ++b) {
        max_pair = std::max(max_pair, haversine_m(clusters[a].centroid, clusters[b].centroid));
      }
    }
    f.max_cluster_distance_m = max_pair;
    if (home) {
      double max_home = 0.0;
      for (const auto& c : clusters) {
        if (&c != home) max_home = std::max(max_home, haversine_m(home->centroid, c.centroid));
      }
      f.max_home_distance_m = max_home;
    }
  }

  LatLon center{0.0, 0.0};
  for (const auto& c : clusters) {
    center.lat += c.centroid.lat;
    center.lon += c.centroid.lon;
  }
  center.lat /= static_cast<double>(clusters.size());
  center.lon /= static_cast<double>(clusters.size());
  double rog = 0.0;
  for (const auto& c : clusters) rog += haversine_m(c.centroid, center);
  f.radius_of_gyration_m = rog / static_cast<double>(clusters.size());

  if (f.cluster_dwell_s > 0.0) {
    double h = 0.0;
    for (const auto& c : clusters) {
      const double p = c.dwell_s / f.cluster_dwell_s;
      if (p > 0.0) h -= p * std::log(p);
    }
    f.entropy = h;
  }

  if (home && !samples.empty()) {
    std::size_t far = 0;
    double far_d = -1.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const double d = haversine_m(samples[i].position(), home->centroid);
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    f.farthest_from_home_hour = local_clock_fraction(samples[far].t, day);
  }
  return f;
}

}  // namespace cogsense
