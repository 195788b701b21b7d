#pragma once

// Synthetic stencils shared by the unit and acceptance tests.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "gravinterp/geodata.hpp"
#include "gravinterp/neighbors.hpp"

namespace fixtures {

using namespace gravinterp;

using Field = std::function<double(const Station&)>;

/// Stations at Cartesian positions; geodetic angles filled from the
/// spherical direction of each point.
inline std::vector<Station> stations_at(const std::vector<CartesianPoint>& pts, const Field& f) {
  std::vector<Station> out;
  out.reserve(pts.size());
  for (const auto& p : pts) {
    Station s;
    s.position = p;
    s.latitude = std::atan2(p.z, std::hypot(p.x, p.y));
    s.longitude = std::atan2(p.y, p.x);
    s.gravity = f(s);
    out.push_back(s);
  }
  return out;
}

/// Points spread over the whole sphere of radius `radius` with small radial
/// jitter (heights), uniformly by area.
inline std::vector<CartesianPoint> sphere_points(std::mt19937_64& rng, std::size_t n, double radius = 6371000.0,
                                                 double max_height = 2000.0) {
  std::uniform_real_distribution<double> z(-1.0, 1.0), lon(-M_PI, M_PI), h(0.0, max_height);
  std::vector<CartesianPoint> out(n);
  for (auto& p : out) {
    const double s = z(rng), c = std::sqrt(1.0 - s * s), l = lon(rng), r = radius + h(rng);
    p = {r * c * std::cos(l), r * c * std::sin(l), r * s};
  }
  return out;
}

inline std::vector<CartesianPoint> positions(const std::vector<Station>& s) {
  std::vector<CartesianPoint> out;
  for (const auto& x : s) out.push_back(x.position);
  return out;
}

/// A station placed exactly at known[k] (same position, angles and value).
inline Station copy_of(const std::vector<Station>& known, std::size_t k) { return known[k]; }

}  // namespace fixtures
