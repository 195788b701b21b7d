#pragma once

#include <cmath>

namespace gravinterp {

/// Earth-centered Cartesian position, meters.
struct CartesianPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const CartesianPoint&, const CartesianPoint&) = default;
};

inline CartesianPoint operator-(const CartesianPoint& a, const CartesianPoint& b) {
  return {a.x - b.x, a.y - b.y, a.z - b.z};
}

inline double dot(const CartesianPoint& a, const CartesianPoint& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline double norm(const CartesianPoint& a) { return std::sqrt(dot(a, a)); }

/// Squared Euclidean distance. The neighbor search orders by exactly this
/// expression, so equal values here are ties there.
inline double squared_distance(const CartesianPoint& a, const CartesianPoint& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return dx * dx + dy * dy + dz * dz;
}

inline double distance(const CartesianPoint& a, const CartesianPoint& b) {
  return std::sqrt(squared_distance(a, b));
}

}  // namespace gravinterp
