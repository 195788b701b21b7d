#pragma once

#include <cmath>
#include <cstddef>
#include <span>

#include "gravinterp/errors.hpp"

namespace gravinterp {

struct ResidualStats {
  double mean = 0.0;
  /// Sample standard deviation about the mean, divisor count - 1.
  double sigma = 0.0;
  std::size_t count = 0;
};

/// Mean and sample standard deviation of residuals (Welford update).
inline ResidualStats residual_sigma(std::span<const double> residuals) {
  if (residuals.size() < 2) throw StatisticsError("residual_sigma needs at least 2 residuals");
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t k = 0;
  for (const double r : residuals) {
    ++k;
    const double d = r - mean;
    mean += d / static_cast<double>(k);
    m2 += d * (r - mean);
  }
  return {mean, std::sqrt(m2 / static_cast<double>(k - 1)), k};
}

}  // namespace gravinterp
