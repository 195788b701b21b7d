#pragma once

// Spherical radial kernels (Poisson, singularity, logarithmic) and local
// kernel interpolation over an n-nearest-neighbor stencil.
//
// The kernels are positive everywhere on the sphere; locality comes only from
// the neighbor stencil. No truncation radius is applied.

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <string_view>

#include "gravinterp/errors.hpp"
#include "gravinterp/geodata.hpp"
#include "gravinterp/linalg.hpp"
#include "gravinterp/neighbors.hpp"
#include "gravinterp/point.hpp"

namespace gravinterp {

enum class KernelFamily { poisson, singularity, logarithmic };

inline constexpr double kMeanEarthRadius = 6371000.0;

struct KernelSpec {
  KernelFamily family = KernelFamily::poisson;
  /// Band parameter, 0 < h < 1.
  double h = 0.5;
  /// Sphere radius, meters.
  double radius = kMeanEarthRadius;

  void validate() const {
    if (!(h > 0.0 && h < 1.0))
      throw ConfigError("band parameter h=" + std::to_string(h) + " must lie in (0, 1)");
    if (!(radius > 0.0) || !std::isfinite(radius)) throw ConfigError("sphere radius R must be > 0");
  }

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

inline std::string to_string(KernelFamily f) {
  switch (f) {
    case KernelFamily::poisson: return "poisson";
    case KernelFamily::singularity: return "singularity";
    case KernelFamily::logarithmic: return "log";
  }
  return {};
}

inline KernelFamily parse_kernel(std::string_view text) {
  if (text == "poisson") return KernelFamily::poisson;
  if (text == "singularity") return KernelFamily::singularity;
  if (text == "log" || text == "logarithmic") return KernelFamily::logarithmic;
  throw ConfigError("unknown kernel '" + std::string(text) +
                    "' (expected poisson, singularity or log)");
}

/// K(a, b). Depends on the points only through |a|, |b| and a.b.
inline double kernel_value(const CartesianPoint& a, const CartesianPoint& b, const KernelSpec& spec) {
  const double aa = dot(a, a);
  const double bb = dot(b, b);
  if (!(aa > 0.0) || !(bb > 0.0)) throw KernelDomainError("kernel points must be nonzero");
  const double hr2 = spec.h * spec.radius * spec.radius;
  const double norms2 = aa * bb;
  const double q = norms2 + hr2 * hr2 - 2.0 * hr2 * dot(a, b);
  if (!(q > 0.0)) throw KernelDomainError("kernel denominator Q is not positive");
  constexpr double inv_4pi = 1.0 / (4.0 * std::numbers::pi);

  switch (spec.family) {
    case KernelFamily::poisson: return inv_4pi * (norms2 - hr2 * hr2) / (q * std::sqrt(q));
    case KernelFamily::singularity: return 2.0 * inv_4pi / std::sqrt(q);
    case KernelFamily::logarithmic: {
      const double denom = std::sqrt(q) + std::sqrt(norms2) - hr2;
      if (!(denom > 0.0)) throw KernelDomainError("logarithmic kernel argument is not positive");
      const double s = 2.0 * hr2 / denom;
      if (!(s > -1.0)) throw KernelDomainError("logarithmic kernel argument is not positive");
      return inv_4pi / (spec.radius * spec.radius) * std::log1p(s);
    }
  }
  return 0.0;
}

/// n x n kernel matrix over the neighbors.
inline Eigen::MatrixXd kernel_matrix(const NeighborSet& neighbors, std::span<const Station> known,
                                     const KernelSpec& spec) {
  const auto n = static_cast<Eigen::Index>(neighbors.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& pi = known[neighbors.indices[static_cast<std::size_t>(i)]].position;
    k(i, i) = kernel_value(pi, pi, spec);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = kernel_value(pi, known[neighbors.indices[static_cast<std::size_t>(j)]].position, spec);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

/// Solve K c = F over the stencil and return sum_i c_i K(query, eta_i).
inline double cssrbf_interpolate(const Station& query, const NeighborSet& neighbors,
                                 std::span<const Station> known, const KernelSpec& spec,
                                 double rcond_min = kDefaultRcondMin) {
  spec.validate();
  if (neighbors.size() < 1) throw ArgumentError("CSSRBF needs at least one neighbor");
  const auto n = static_cast<Eigen::Index>(neighbors.size());
  const Eigen::MatrixXd k = kernel_matrix(neighbors, known, spec);
  Eigen::VectorXd f(n);
  Eigen::VectorXd kq(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = known[neighbors.indices[static_cast<std::size_t>(i)]];
    f(i) = s.gravity;
    kq(i) = kernel_value(query.position, s.position, spec);
  }
  return kq.dot(solve_gated(k, f, rcond_min));
}

}  // namespace gravinterp
