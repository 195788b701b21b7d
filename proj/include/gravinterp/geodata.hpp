#pragma once

// Point gravity observations: CSV ingest, geodetic <-> Cartesian conversion
// and the known/query split.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <numbers>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include "gravinterp/errors.hpp"
#include "gravinterp/point.hpp"

namespace gravinterp {

inline constexpr std::string_view kObservationHeader = "lat_deg,lon_deg,height_m,gravity_mgal";

/// One surveyed point. Angles in degrees, height in meters, gravity in mGal.
struct GravityObservation {
  double latitude = 0.0;
  double longitude = 0.0;
  double height = 0.0;
  double gravity = 0.0;

  friend bool operator==(const GravityObservation&, const GravityObservation&) = default;
};

/// Reference ellipsoid given by semi-major axis and inverse flattening.
/// An inverse flattening of 0 denotes a sphere of radius `a`.
struct Ellipsoid {
  double a = 6378137.0;
  double inverse_flattening = 298.257223563;

  static Ellipsoid wgs84() { return {}; }

  double flattening() const { return inverse_flattening == 0.0 ? 0.0 : 1.0 / inverse_flattening; }
  double eccentricity_squared() const {
    const double f = flattening();
    return f * (2.0 - f);
  }
  double semi_minor_axis() const { return a * (1.0 - flattening()); }

  void validate() const {
    if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("ellipsoid semi-major axis must be > 0");
    if (!std::isfinite(inverse_flattening) ||
        (inverse_flattening != 0.0 && inverse_flattening <= 1.0))
      throw ConfigError("ellipsoid inverse flattening must be 0 (sphere) or > 1");
  }
};

/// Geodetic coordinates with angles in radians.
struct GeodeticCoords {
  double latitude = 0.0;
  double longitude = 0.0;
  double height = 0.0;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline double parse_double(std::string_view field, std::size_t line, const char* name) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty())
    throw ParseError(line, std::string("bad ") + name + " field '" + std::string(field) + "'");
  return value;
}

/// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace detail

inline void validate(const GravityObservation& obs) {
  if (!(obs.latitude >= -90.0 && obs.latitude <= 90.0))
    throw ValidationError("latitude " + detail::format_double(obs.latitude) + " outside [-90, 90]");
  if (!(obs.longitude >= -180.0 && obs.longitude < 360.0))
    throw ValidationError("longitude " + detail::format_double(obs.longitude) +
                          " outside [-180, 360)");
  if (!std::isfinite(obs.height)) throw ValidationError("height is not finite");
  if (!std::isfinite(obs.gravity)) throw ValidationError("gravity is not finite");
}

/// Parse one data record (no header). Throws ParseError / ValidationError.
inline GravityObservation parse_observation_line(std::string_view text, std::size_t line = 1) {
  text = detail::trim(text);
  std::string_view fields[4];
  std::size_t count = 0;
  while (true) {
    const auto comma = text.find(',');
    if (count == 4) throw ParseError(line, "expected 4 fields, found more");
    fields[count++] = text.substr(0, comma);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (count != 4) throw ParseError(line, "expected 4 fields, found " + std::to_string(count));

  GravityObservation obs{detail::parse_double(fields[0], line, "lat_deg"),
                         detail::parse_double(fields[1], line, "lon_deg"),
                         detail::parse_double(fields[2], line, "height_m"),
                         detail::parse_double(fields[3], line, "gravity_mgal")};
  try {
    validate(obs);
  } catch (const ValidationError& e) {
    throw ValidationError("line " + std::to_string(line) + ": " + e.what());
  }
  return obs;
}

/// Read a headered CSV stream. Blank lines are skipped; LF and CRLF are accepted.
inline std::vector<GravityObservation> parse_observations(std::istream& in) {
  std::vector<GravityObservation> out;
  std::string buffer;
  std::size_t line = 0;
  bool header_seen = false;
  while (std::getline(in, buffer)) {
    ++line;
    std::string_view text = detail::trim(buffer);
    if (line == 1 && text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
    if (text.empty()) continue;
    if (!header_seen) {
      if (text != kObservationHeader)
        throw ParseError(line, "expected header '" + std::string(kObservationHeader) + "'");
      header_seen = true;
      continue;
    }
    out.push_back(parse_observation_line(text, line));
  }
  if (!header_seen) throw ParseError(line == 0 ? 1 : line, "missing header");
  return out;
}

inline void write_observations(std::ostream& out, const std::vector<GravityObservation>& obs) {
  out << kObservationHeader << '\n';
  for (const auto& o : obs) {
    out << detail::format_double(o.latitude) << ',' << detail::format_double(o.longitude) << ','
        << detail::format_double(o.height) << ',' << detail::format_double(o.gravity) << '\n';
  }
}

inline double deg2rad(double deg) { return deg * (std::numbers::pi / 180.0); }
inline double rad2deg(double rad) { return rad * (180.0 / std::numbers::pi); }

/// Geodetic (radians, meters) to Earth-centered Cartesian.
inline CartesianPoint geodetic_to_cartesian(const GeodeticCoords& g, const Ellipsoid& ell) {
  const double e2 = ell.eccentricity_squared();
  const double sin_lat = std::sin(g.latitude);
  const double cos_lat = std::cos(g.latitude);
  const double n = ell.a / std::sqrt(1.0 - e2 * sin_lat * sin_lat);
  return {(n + g.height) * cos_lat * std::cos(g.longitude),
          (n + g.height) * cos_lat * std::sin(g.longitude),
          (n * (1.0 - e2) + g.height) * sin_lat};
}

inline CartesianPoint geodetic_to_cartesian(const GravityObservation& obs, const Ellipsoid& ell) {
  return geodetic_to_cartesian(
      GeodeticCoords{deg2rad(obs.latitude), deg2rad(obs.longitude), obs.height}, ell);
}

/// Iterative inverse of geodetic_to_cartesian. Longitude returned in (-pi, pi].
inline GeodeticCoords cartesian_to_geodetic(const CartesianPoint& p, const Ellipsoid& ell) {
  const double e2 = ell.eccentricity_squared();
  const double rho = std::hypot(p.x, p.y);
  GeodeticCoords g;
  g.longitude = std::atan2(p.y, p.x);
  double lat = std::atan2(p.z, rho * (1.0 - e2));
  for (int iter = 0; iter < 50; ++iter) {
    const double s = std::sin(lat);
    const double n = ell.a / std::sqrt(1.0 - e2 * s * s);
    const double next = std::atan2(p.z + e2 * n * s, rho);
    const bool done = std::abs(next - lat) < 1e-15;
    lat = next;
    if (done) break;
  }
  const double s = std::sin(lat);
  const double c = std::cos(lat);
  g.latitude = lat;
  // Valid at all latitudes including the poles.
  g.height = rho * c + p.z * s - ell.a * std::sqrt(1.0 - e2 * s * s);
  return g;
}

/// Sanity band for surface observations: the point's norm must lie within
/// `tolerance` meters of the ellipsoid's geocentric radius at the same latitude.
inline bool within_surface_band(const CartesianPoint& p, const Ellipsoid& ell,
                                double tolerance = 15000.0) {
  const auto g = cartesian_to_geodetic(p, ell);
  const auto foot = geodetic_to_cartesian(GeodeticCoords{g.latitude, g.longitude, 0.0}, ell);
  return std::abs(norm(p) - norm(foot)) <= tolerance;
}

/// A point entering the interpolation: Cartesian position, geodetic angles
/// (radians, needed by the spherical-harmonic basis) and gravity in mGal.
struct Station {
  CartesianPoint position;
  double latitude = 0.0;
  double longitude = 0.0;
  double gravity = 0.0;
};

inline Station make_station(const GravityObservation& obs, const Ellipsoid& ell) {
  return {geodetic_to_cartesian(obs, ell), deg2rad(obs.latitude), deg2rad(obs.longitude),
          obs.gravity};
}

/// Known points D and held-out interpolation points. `*_source` map each
/// entry back to its row in the input observation list.
struct Dataset {
  std::vector<Station> known;
  std::vector<Station> queries;
  std::vector<std::size_t> known_source;
  std::vector<std::size_t> query_source;
};

struct IndexSelection {
  std::vector<std::size_t> indices;
};

/// Geographic box in degrees, bounds inclusive.
struct BoundingBox {
  double lat_min = 0.0;
  double lat_max = 0.0;
  double lon_min = 0.0;
  double lon_max = 0.0;

  bool contains(const GravityObservation& o) const {
    return o.latitude >= lat_min && o.latitude <= lat_max && o.longitude >= lon_min &&
           o.longitude <= lon_max;
  }
};

using QuerySelector = std::variant<IndexSelection, BoundingBox>;

/// Partition observations into queries (the selected subset) and known points
/// (the complement). Both parts keep input order.
inline Dataset split_dataset(const std::vector<GravityObservation>& observations,
                             const QuerySelector& selector,
                             const Ellipsoid& ellipsoid = Ellipsoid::wgs84()) {
  ellipsoid.validate();
  std::vector<bool> selected(observations.size(), false);
  if (const auto* idx = std::get_if<IndexSelection>(&selector)) {
    for (const auto i : idx->indices) {
      if (i >= observations.size())
        throw ConfigError("query index " + std::to_string(i) + " out of range (" +
                          std::to_string(observations.size()) + " observations)");
      selected[i] = true;
    }
  } else {
    const auto& box = std::get<BoundingBox>(selector);
    for (std::size_t i = 0; i < observations.size(); ++i) selected[i] = box.contains(observations[i]);
  }

  const auto n_selected = static_cast<std::size_t>(std::count(selected.begin(), selected.end(), true));
  if (n_selected == 0) throw ConfigError("query selection is empty");
  if (n_selected == observations.size()) throw ConfigError("query selection leaves no known points");

  Dataset ds;
  ds.known.reserve(observations.size() - n_selected);
  ds.queries.reserve(n_selected);
  for (std::size_t i = 0; i < observations.size(); ++i) {
    auto station = make_station(observations[i], ellipsoid);
    if (selected[i]) {
      ds.queries.push_back(station);
      ds.query_source.push_back(i);
    } else {
      ds.known.push_back(station);
      ds.known_source.push_back(i);
    }
  }
  return ds;
}

}  // namespace gravinterp
