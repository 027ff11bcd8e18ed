#pragma once

// Location cleaning, stationary/moving classification, trajectory geometry
// and significant-place clustering for one day of samples.

#include <span>
#include <vector>

#include "cogsense/timeline.hpp"

namespace cogsense {

struct LocationConfig {
  double max_accuracy_m = 100.0;
  double max_speed_mps = 50.0;  // 180 km/h
  double stationary_radius_m = 200.0;
  double stationary_window_s = 600.0;  // centered, +/- half
  double dwell_cap_s = 600.0;
  double variance_epsilon = 1e-12;
  double dbscan_eps_m = 40.0;
  std::size_t dbscan_min_points = 5;
};

/// Local equirectangular projection (meters) about a reference point.
struct LocalProjection {
  LatLon origin;
  double x(LatLon p) const;
  double y(LatLon p) const;
  static LocalProjection about_mean(std::span<const LocationSample> samples);
};

struct PlanarPoint {
  double x = 0.0;
  double y = 0.0;
};

/// Convex hull, counter-clockwise, collinear points dropped (monotone chain).
std::vector<PlanarPoint> convex_hull(std::vector<PlanarPoint> points);
double polygon_area(std::span<const PlanarPoint> ring);
double polygon_perimeter(std::span<const PlanarPoint> ring);

/// Perimeter over the circumference of the circle with the same area.
double gravelius_compactness(double perimeter, double area);

/// Drops samples with accuracy above the limit or speed above the limit.
/// Samples without a reported speed use the speed implied by the previously
/// retained sample. Output is time-sorted.
std::vector<LocationSample> filter_location(std::vector<LocationSample> samples,
                                            const LocationConfig& config = {});

/// A sample is stationary when every sample within +/- half the window lies
/// closer than the radius. Input must be time-sorted.
std::vector<bool> classify_stationary(std::span<const LocationSample> samples,
                                      const LocationConfig& config = {});

/// Gap to the next sample, capped; the last sample dwells 0 s.
std::vector<double> dwell_seconds(std::span<const LocationSample> samples,
                                  const LocationConfig& config = {});

struct LocationGeometry {
  double log_variance = kMissing;
  double total_distance_m = 0.0;
  double hull_area_m2 = kMissing;
  double hull_perimeter_m = kMissing;
  double hull_compactness = kMissing;
  double stationary_s = 0.0;
  double moving_s = 0.0;
  double first_move_hour = kMissing;
};

LocationGeometry location_geometry(std::span<const LocationSample> samples,
                                   const std::vector<bool>& stationary, const LocalDay& day,
                                   const LocationConfig& config = {});

/// DBSCAN labels: cluster index >= 0, or -1 for noise. `min_points` counts
/// the point itself.
std::vector<int> dbscan(std::span<const PlanarPoint> points, double eps, std::size_t min_points);

struct PlaceCluster {
  LatLon centroid;
  std::vector<std::size_t> members;  // indices into the day's filtered samples
  double dwell_s = 0.0;
  double night_dwell_s = 0.0;  // dwell overlapping 00:00-06:00 local
  bool is_home = false;
};

/// Clusters the stationary samples; home is the cluster with the most night dwell.
std::vector<PlaceCluster> cluster_places(std::span<const LocationSample> samples,
                                         const std::vector<bool>& stationary,
                                         const LocalDay& day, const LocationConfig& config = {});

struct PlaceFeatures {
  double cluster_count = 0.0;
  double cluster_dwell_s = 0.0;
  double home_dwell_s = 0.0;
  double max_cluster_distance_m = kMissing;
  double max_home_distance_m = kMissing;
  double radius_of_gyration_m = kMissing;
  double entropy = kMissing;
  double farthest_from_home_hour = kMissing;
};

PlaceFeatures place_features(std::span<const PlaceCluster> clusters,
                             std::span<const LocationSample> samples, const LocalDay& day);

}  // namespace cogsense
