#pragma once

// Synthetic gravity observations for demos and tests.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "gravinterp/geodata.hpp"

namespace gravinterp {

struct SyntheticOptions {
  std::size_t count = 600;
  double lat_min = -90.0;
  double lat_max = 90.0;
  double lon_min = -180.0;
  double lon_max = 180.0;
  double height_min = 0.0;
  double height_max = 2000.0;
  std::uint64_t seed = 1;
};

/// Smooth gravity-like field in mGal: latitude-dependent normal gravity, a
/// free-air height gradient and a few long-wavelength undulations.
inline double synthetic_gravity(double lat_deg, double lon_deg, double height_m) {
  const double phi = deg2rad(lat_deg);
  const double lam = deg2rad(lon_deg);
  const double s = std::sin(phi);
  const double normal = 978032.53359 * (1.0 + 0.00193185265241 * s * s) /
                        std::sqrt(1.0 - 0.00669437999013 * s * s);
  return normal - 0.3086 * height_m + 40.0 * std::cos(phi) * std::cos(2.0 * lam) +
         25.0 * std::sin(3.0 * phi) * std::sin(lam);
}

/// Points uniformly distributed by area over a latitude/longitude box.
inline std::vector<GravityObservation> synthetic_observations(const SyntheticOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> sin_lat(std::sin(deg2rad(opt.lat_min)), std::sin(deg2rad(opt.lat_max)));
  std::uniform_real_distribution<double> lon(opt.lon_min, opt.lon_max);
  std::uniform_real_distribution<double> height(opt.height_min, opt.height_max);
  std::vector<GravityObservation> out;
  out.reserve(opt.count);
  for (std::size_t i = 0; i < opt.count; ++i) {
    GravityObservation o;
    o.latitude = rad2deg(std::asin(sin_lat(rng)));
    o.longitude = lon(rng);
    o.height = height(rng);
    o.gravity = synthetic_gravity(o.latitude, o.longitude, o.height);
    out.push_back(o);
  }
  return out;
}

/// Every `stride`-th index starting at `offset`, as a query selection.
inline IndexSelection every_nth(std::size_t count, std::size_t stride, std::size_t offset = 0) {
  IndexSelection sel;
  for (std::size_t i = offset; i < count; i += stride) sel.indices.push_back(i);
  return sel;
}

}  // namespace gravinterp
