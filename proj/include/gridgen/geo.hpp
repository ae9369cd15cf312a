#pragma once

#include <cmath>
#include <vector>

#include "gridgen/errors.hpp"

namespace gridgen {

// IUGG mean Earth radius. All geographic math is spherical.
inline constexpr double kEarthRadiusKm = 6371.0088;
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDegToRad = kPi / 180.0;

// Geographic position in decimal degrees.
struct GeoPoint {
  double lon = 0.0;  // [-180, 180]
  double lat = 0.0;  // [-90, 90]
};

// Planar position in km (projected).
struct PlanarPoint {
  double x = 0.0;
  double y = 0.0;
};

inline void validate(const GeoPoint& p) {
  if (!std::isfinite(p.lon) || !std::isfinite(p.lat))
    throw input_error("geographic coordinate is not finite");
  if (p.lon < -180.0 || p.lon > 180.0)
    throw input_error("longitude out of range [-180, 180]");
  if (p.lat < -90.0 || p.lat > 90.0)
    throw input_error("latitude out of range [-90, 90]");
}

inline double distance(const PlanarPoint& a, const PlanarPoint& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

inline double squared_distance(const PlanarPoint& a, const PlanarPoint& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

// Haversine great-circle distance in km.
inline double great_circle_km(const GeoPoint& a, const GeoPoint& b) {
  const double lat1 = a.lat * kDegToRad;
  const double lat2 = b.lat * kDegToRad;
  const double dlat = (b.lat - a.lat) * kDegToRad;
  const double dlon = (b.lon - a.lon) * kDegToRad;
  const double sl = std::sin(0.5 * dlat);
  const double so = std::sin(0.5 * dlon);
  const double h = sl * sl + std::cos(lat1) * std::cos(lat2) * so * so;
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

// Initial bearing from `from` towards `to`, radians clockwise from north.
inline double initial_bearing_rad(const GeoPoint& from, const GeoPoint& to) {
  const double lat1 = from.lat * kDegToRad;
  const double lat2 = to.lat * kDegToRad;
  const double dlon = (to.lon - from.lon) * kDegToRad;
  const double y = std::sin(dlon) * std::cos(lat2);
  const double x = std::cos(lat1) * std::sin(lat2) - std::sin(lat1) * std::cos(lat2) * std::cos(dlon);
  return std::atan2(y, x);
}

// Azimuthal equidistant projection centered at `center`: the planar radius of
// the image equals the great-circle distance from the center and the planar
// azimuth equals the initial bearing (x east, y north). Points within 1 km of
// the antipode are rejected; the projection is singular there.
inline PlanarPoint project_point(const GeoPoint& p, const GeoPoint& center) {
  const double d = great_circle_km(center, p);
  if (d > kPi * kEarthRadiusKm - 1.0)
    throw input_error("point is antipodal to the projection center");
  if (d == 0.0) return {0.0, 0.0};
  const double theta = initial_bearing_rad(center, p);
  return {d * std::sin(theta), d * std::cos(theta)};
}

inline std::vector<PlanarPoint> project(const std::vector<GeoPoint>& points, const GeoPoint& center) {
  if (points.empty()) throw input_error("project: empty point list");
  std::vector<PlanarPoint> out;
  out.reserve(points.size());
  for (const GeoPoint& p : points) out.push_back(project_point(p, center));
  return out;
}

// Arc length of a geographic polyline; 0 for a single point.
inline double polyline_length_km(const std::vector<GeoPoint>& points) {
  if (points.empty()) throw input_error("polyline_length_km: empty point list");
  double total = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i)
    total += great_circle_km(points[i - 1], points[i]);
  return total;
}

}  // namespace gridgen
