#pragma once

// Interpolating moving least squares over an n-nearest-neighbor stencil, and
// the general weighted MLS fit it specializes.
//
// IMLS: with n equal to the number of basis functions the neighbor basis
// matrix B is square and the fit interpolates. We solve B c = F and return
// row(query) . c, which equals sum_i a_i f_i with a = B^-T row(query).

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include "gravinterp/basis.hpp"
#include "gravinterp/errors.hpp"
#include "gravinterp/geodata.hpp"
#include "gravinterp/linalg.hpp"
#include "gravinterp/neighbors.hpp"

namespace gravinterp {

enum class WeightShape { gaussian, spline, inverse_distance };

/// Radial weight profile Psi on [0, 1]; cut off to zero for r >= 1.
/// `parameter` is the gaussian width c or the inverse-distance offset.
struct WeightSpec {
  WeightShape shape = WeightShape::gaussian;
  double parameter = 0.4;

  static WeightSpec gaussian(double width = 0.4) { return {WeightShape::gaussian, width}; }
  static WeightSpec spline() { return {WeightShape::spline, 0.0}; }
  static WeightSpec inverse_distance(double offset = 1e-9) {
    return {WeightShape::inverse_distance, offset};
  }

  friend bool operator==(const WeightSpec&, const WeightSpec&) = default;
};

inline std::string to_string(WeightShape s) {
  switch (s) {
    case WeightShape::gaussian: return "gaussian";
    case WeightShape::spline: return "spline";
    case WeightShape::inverse_distance: return "inverse";
  }
  return {};
}

inline WeightSpec parse_weight(std::string_view text) {
  if (text == "gaussian") return WeightSpec::gaussian();
  if (text == "spline") return WeightSpec::spline();
  if (text == "inverse" || text == "inverse_distance") return WeightSpec::inverse_distance();
  throw ConfigError("unknown weight '" + std::string(text) + "' (expected gaussian, spline or inverse)");
}

/// Psi(r) without the cutoff.
inline double weight_profile(double r, const WeightSpec& spec) {
  switch (spec.shape) {
    case WeightShape::gaussian: {
      const double s = r / spec.parameter;
      return std::exp(-s * s);
    }
    case WeightShape::spline: {
      // Wendland C2
      const double t = 1.0 - r;
      return t * t * t * t * (4.0 * r + 1.0);
    }
    case WeightShape::inverse_distance: return 1.0 / (r + spec.parameter);
  }
  return 0.0;
}

/// w = H(1 - r) Psi(r), r = |query - neighbor| / delta, with H(0) = 0.
inline double weight(const CartesianPoint& query, const CartesianPoint& neighbor, double delta,
                     const WeightSpec& spec) {
  if (!(delta > 0.0)) throw DegenerateScaleError("support radius delta must be > 0");
  const double r = distance(query, neighbor) / delta;
  if (r >= 1.0) return 0.0;
  return weight_profile(r, spec);
}

/// Square interpolation solve: B c = F, value = query_row . c.
inline double interpolate_square(const Eigen::MatrixXd& basis, const Eigen::VectorXd& values,
                                 const Eigen::RowVectorXd& query_row,
                                 double rcond_min = kDefaultRcondMin) {
  if (basis.rows() != basis.cols() || basis.rows() != values.size() ||
      query_row.size() != basis.cols())
    throw ArgumentError("interpolate_square: dimension mismatch");
  return query_row.dot(solve_gated(basis, values, rcond_min));
}

namespace detail {

inline void fill_basis_rows(const BasisSpec& spec, const NeighborSet& neighbors,
                            std::span<const Station> known, double ell, Eigen::MatrixXd& b,
                            Eigen::VectorXd& f) {
  const auto m = basis_count(spec);
  const auto n = neighbors.size();
  const auto& reference = known[neighbors.indices.front()].position;
  b.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  f.resize(static_cast<Eigen::Index>(n));
  Eigen::RowVectorXd row(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = known[neighbors.indices[i]];
    basis_row(spec, s, reference, ell, std::span<double>(row.data(), m));
    b.row(static_cast<Eigen::Index>(i)) = row;
    f(static_cast<Eigen::Index>(i)) = s.gravity;
  }
}

inline Eigen::RowVectorXd query_basis_row(const BasisSpec& spec, const Station& query,
                                          const NeighborSet& neighbors,
                                          std::span<const Station> known, double ell) {
  const auto m = basis_count(spec);
  Eigen::RowVectorXd row(static_cast<Eigen::Index>(m));
  basis_row(spec, query, known[neighbors.indices.front()].position, ell,
            std::span<double>(row.data(), m));
  return row;
}

inline void check_basis(const BasisSpec& spec) {
  if (spec.is_monomial()) {
    if (spec.degree < 1 || spec.degree > 3) throw ArgumentError("monomial degree must be 1, 2 or 3");
  } else if (spec.degree < 0) {
    throw ArgumentError("harmonic degree must be >= 0");
  }
}

}  // namespace detail

/// IMLS value at `query` from exactly basis_count(spec) neighbors.
/// Monomial families are scaled by `ell` relative to the nearest neighbor.
inline double imls_interpolate(const Station& query, const NeighborSet& neighbors,
                               std::span<const Station> known, const BasisSpec& spec, double ell,
                               double rcond_min = kDefaultRcondMin) {
  detail::check_basis(spec);
  const auto m = basis_count(spec);
  if (neighbors.size() != m)
    throw ArgumentError("IMLS with basis " + to_string(spec) + " needs " + std::to_string(m) +
                        " neighbors, got " + std::to_string(neighbors.size()));
  if (spec.is_monomial() && !(ell > 0.0)) throw DegenerateScaleError("scale parameter ell must be > 0");

  Eigen::MatrixXd b;
  Eigen::VectorXd f;
  detail::fill_basis_rows(spec, neighbors, known, ell, b, f);
  return interpolate_square(b, f, detail::query_basis_row(spec, query, neighbors, known, ell),
                            rcond_min);
}

/// Relative inflation of delta in the weighted path, so that the farthest
/// neighbor (r = 1 exactly) keeps a positive weight.
inline constexpr double kSupportInflation = 1e-6;

/// Weighted MLS value: alpha = (B^T W B)^-1 B^T W F, value = row(query) . alpha.
inline double mls_approximate(const Station& query, const NeighborSet& neighbors,
                              std::span<const Station> known, const BasisSpec& spec,
                              const WeightSpec& wspec, double ell,
                              double rcond_min = kDefaultRcondMin) {
  detail::check_basis(spec);
  const auto m = basis_count(spec);
  if (neighbors.size() < m)
    throw ArgumentError("MLS with basis " + to_string(spec) + " needs at least " +
                        std::to_string(m) + " neighbors, got " + std::to_string(neighbors.size()));
  if (spec.is_monomial() && !(ell > 0.0)) throw DegenerateScaleError("scale parameter ell must be > 0");

  Eigen::MatrixXd b;
  Eigen::VectorXd f;
  detail::fill_basis_rows(spec, neighbors, known, ell, b, f);

  const double delta = neighbors.delta * (1.0 + kSupportInflation);
  Eigen::VectorXd w(b.rows());
  std::size_t positive = 0;
  for (Eigen::Index i = 0; i < b.rows(); ++i) {
    w(i) = weight(query.position, known[neighbors.indices[static_cast<std::size_t>(i)]].position,
                  delta, wspec);
    if (w(i) > 0.0) ++positive;
  }
  if (positive < m)
    throw ArgumentError("MLS needs at least " + std::to_string(m) + " positively weighted neighbors");

  const Eigen::MatrixXd btw = b.transpose() * w.asDiagonal();
  const Eigen::VectorXd alpha = solve_gated(btw * b, btw * f, rcond_min);
  return detail::query_basis_row(spec, query, neighbors, known, ell).dot(alpha);
}

}  // namespace gravinterp
