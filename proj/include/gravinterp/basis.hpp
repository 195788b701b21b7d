#pragma once

// Basis rows for the IMLS local systems: scaled trivariate monomials up to
// total degree 3 and surface spherical harmonics up to degree J.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gravinterp/errors.hpp"
#include "gravinterp/geodata.hpp"
#include "gravinterp/point.hpp"

namespace gravinterp {

enum class BasisFamily { planar, quadratic, cubic, spherical_harmonics };

struct BasisSpec {
  BasisFamily family = BasisFamily::planar;
  /// Monomial total degree v (implied by family) or maximum harmonic degree J.
  int degree = 1;

  static BasisSpec planar() { return {BasisFamily::planar, 1}; }
  static BasisSpec quadratic() { return {BasisFamily::quadratic, 2}; }
  static BasisSpec cubic() { return {BasisFamily::cubic, 3}; }
  static BasisSpec spherical_harmonics(int max_degree) {
    return {BasisFamily::spherical_harmonics, max_degree};
  }

  bool is_monomial() const { return family != BasisFamily::spherical_harmonics; }

  friend bool operator==(const BasisSpec&, const BasisSpec&) = default;
};

/// Number of monomials x^i y^j z^k with i+j+k <= v.
constexpr std::size_t basis_count(int v) {
  if (v < 0) return 0;
  const auto u = static_cast<std::size_t>(v);
  return (u + 1) * (u + 2) * (u + 3) / 6;
}

/// Number of surface spherical harmonics up to degree J.
constexpr std::size_t spherical_harmonic_count(int max_degree) {
  const auto u = static_cast<std::size_t>(max_degree + 1);
  return u * u;
}

inline std::size_t basis_count(const BasisSpec& spec) {
  return spec.is_monomial() ? basis_count(spec.degree) : spherical_harmonic_count(spec.degree);
}

/// "planar", "quadratic", "cubic" or "sph:J".
inline std::string to_string(const BasisSpec& spec) {
  switch (spec.family) {
    case BasisFamily::planar: return "planar";
    case BasisFamily::quadratic: return "quadratic";
    case BasisFamily::cubic: return "cubic";
    case BasisFamily::spherical_harmonics: return "sph:" + std::to_string(spec.degree);
  }
  return {};
}

inline BasisSpec parse_basis(std::string_view text) {
  if (text == "planar") return BasisSpec::planar();
  if (text == "quadratic") return BasisSpec::quadratic();
  if (text == "cubic") return BasisSpec::cubic();
  if (text.starts_with("sph:")) {
    const auto digits = text.substr(4);
    int j = -1;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), j);
    if (ec == std::errc() && ptr == digits.data() + digits.size() && j >= 0 && !digits.empty())
      return BasisSpec::spherical_harmonics(j);
  }
  throw ConfigError("unknown basis '" + std::string(text) +
                    "' (expected planar, quadratic, cubic or sph:J)");
}

/// Coordinates shifted to a reference point and divided by ell.
struct ScaledCoords {
  double X = 0.0;
  double Y = 0.0;
  double Z = 0.0;
};

inline ScaledCoords scale_coordinates(const CartesianPoint& point, const CartesianPoint& reference,
                                      double ell) {
  if (!(ell > 0.0)) throw DegenerateScaleError("scale parameter ell must be > 0");
  return {(point.x - reference.x) / ell, (point.y - reference.y) / ell,
          (point.z - reference.z) / ell};
}

/// Monomial row of total degree v in the fixed term order
///   1, X, Y, Z,
///   X^2, Y^2, Z^2, XY, XZ, YZ,
///   X^3, Y^3, Z^3, X^2Y, XY^2, X^2Z, XZ^2, Y^2Z, YZ^2, XYZ.
inline void monomial_row(const ScaledCoords& c, int v, std::span<double> out) {
  if (v < 1 || v > 3) throw ArgumentError("monomial degree must be 1, 2 or 3");
  if (out.size() != basis_count(v)) throw ArgumentError("monomial_row: output size mismatch");
  const double x = c.X, y = c.Y, z = c.Z;
  out[0] = 1.0;
  out[1] = x;
  out[2] = y;
  out[3] = z;
  if (v < 2) return;
  out[4] = x * x;
  out[5] = y * y;
  out[6] = z * z;
  out[7] = x * y;
  out[8] = x * z;
  out[9] = y * z;
  if (v < 3) return;
  out[10] = x * x * x;
  out[11] = y * y * y;
  out[12] = z * z * z;
  out[13] = x * x * y;
  out[14] = x * y * y;
  out[15] = x * x * z;
  out[16] = x * z * z;
  out[17] = y * y * z;
  out[18] = y * z * z;
  out[19] = x * y * z;
}

inline std::vector<double> monomial_row(const ScaledCoords& c, int v) {
  if (v < 1 || v > 3) throw ArgumentError("monomial degree must be 1, 2 or 3");
  std::vector<double> row(basis_count(v));
  monomial_row(c, v, row);
  return row;
}

/// Fully normalized associated Legendre functions (geodesy 4pi normalization,
/// no Condon-Shortley phase) for all 0 <= j <= i <= max_degree at t = sin(phi).
/// Triangular storage: value (i, j) at index i*(i+1)/2 + j.
class LegendreTable {
 public:
  LegendreTable(int max_degree, double t) : max_degree_(max_degree) {
    if (max_degree < 0) throw ArgumentError("Legendre degree must be >= 0");
    if (!(std::abs(t) <= 1.0)) throw ArgumentError("Legendre argument must lie in [-1, 1]");
    values_.assign(offset(max_degree + 1), 0.0);
    const double u = std::sqrt((1.0 - t) * (1.0 + t));

    // Sectoral seeds, then upward recursion in degree along each order.
    values_[0] = 1.0;
    for (int m = 1; m <= max_degree; ++m) {
      const double f = m == 1 ? std::sqrt(3.0) : std::sqrt((2.0 * m + 1.0) / (2.0 * m));
      at(m, m) = f * u * at(m - 1, m - 1);
    }
    for (int m = 0; m < max_degree; ++m) {
      at(m + 1, m) = std::sqrt(2.0 * m + 3.0) * t * at(m, m);
      for (int n = m + 2; n <= max_degree; ++n) {
        const double nm = static_cast<double>(n - m) * (n + m);
        const double a = std::sqrt((2.0 * n - 1.0) * (2.0 * n + 1.0) / nm);
        const double b =
            std::sqrt((2.0 * n + 1.0) * (n + m - 1.0) * (n - m - 1.0) / (nm * (2.0 * n - 3.0)));
        at(n, m) = a * t * at(n - 1, m) - b * at(n - 2, m);
      }
    }
  }

  int max_degree() const { return max_degree_; }

  double operator()(int i, int j) const {
    if (j < 0 || j > i || i > max_degree_) throw ArgumentError("Legendre index out of range");
    return values_[offset(i) + static_cast<std::size_t>(j)];
  }

 private:
  static std::size_t offset(int i) {
    const auto u = static_cast<std::size_t>(i);
    return u * (u + 1) / 2;
  }
  double& at(int i, int j) { return values_[offset(i) + static_cast<std::size_t>(j)]; }

  int max_degree_;
  std::vector<double> values_;
};

/// Single fully normalized associated Legendre value of degree i, order j.
inline double legendre(int i, int j, double t) {
  if (j < 0 || j > i) throw ArgumentError("legendre: order must satisfy 0 <= j <= i");
  return LegendreTable(i, t)(i, j);
}

/// Spherical-harmonic row up to degree J, ordered as
///   P_ij(sin phi) cos(j lambda) for i = 0..J, j = 0..i, then
///   P_ij(sin phi) sin(j lambda) for i = 1..J, j = 1..i.
inline void spherical_harmonic_row(double phi, double lambda, int max_degree, std::span<double> out) {
  if (max_degree < 0) throw ArgumentError("harmonic degree must be >= 0");
  if (out.size() != spherical_harmonic_count(max_degree))
    throw ArgumentError("spherical_harmonic_row: output size mismatch");
  const LegendreTable p(max_degree, std::sin(phi));
  std::vector<double> cos_j(static_cast<std::size_t>(max_degree) + 1);
  std::vector<double> sin_j(cos_j.size());
  for (int j = 0; j <= max_degree; ++j) {
    cos_j[static_cast<std::size_t>(j)] = std::cos(j * lambda);
    sin_j[static_cast<std::size_t>(j)] = std::sin(j * lambda);
  }
  std::size_t k = 0;
  for (int i = 0; i <= max_degree; ++i)
    for (int j = 0; j <= i; ++j) out[k++] = p(i, j) * cos_j[static_cast<std::size_t>(j)];
  for (int i = 1; i <= max_degree; ++i)
    for (int j = 1; j <= i; ++j) out[k++] = p(i, j) * sin_j[static_cast<std::size_t>(j)];
}

inline std::vector<double> spherical_harmonic_row(double phi, double lambda, int max_degree) {
  if (max_degree < 0) throw ArgumentError("harmonic degree must be >= 0");
  std::vector<double> row(spherical_harmonic_count(max_degree));
  spherical_harmonic_row(phi, lambda, max_degree, row);
  return row;
}

/// Basis row of `spec` at `station`. Monomial families use coordinates scaled
/// relative to `reference`; spherical harmonics use the station's (phi, lambda).
inline void basis_row(const BasisSpec& spec, const Station& station, const CartesianPoint& reference,
                      double ell, std::span<double> out) {
  if (spec.is_monomial())
    monomial_row(scale_coordinates(station.position, reference, ell), spec.degree, out);
  else
    spherical_harmonic_row(station.latitude, station.longitude, spec.degree, out);
}

}  // namespace gravinterp
