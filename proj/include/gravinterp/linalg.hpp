#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "gravinterp/errors.hpp"

namespace gravinterp {

inline constexpr double kDefaultRcondMin = 1e-12;

/// Solve A x = b with partial-pivot LU. Rejects the system when the
/// reciprocal 1-norm condition estimate is below rcond_min or the solution
/// is not finite. The LU estimate can miss exact singularity, so it is
/// capped by the ratio of smallest to largest pivot magnitude.
inline Eigen::VectorXd solve_gated(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                   double rcond_min = kDefaultRcondMin, double* rcond_out = nullptr) {
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  double rcond = a.size() == 0 ? 0.0 : lu.rcond();
  if (a.size() > 0) {
    const Eigen::VectorXd pivots = lu.matrixLU().diagonal().cwiseAbs();
    const double top = pivots.maxCoeff();
    rcond = std::min(rcond, top > 0.0 ? pivots.minCoeff() / top : 0.0);
  }
  if (!std::isfinite(rcond)) rcond = 0.0;
  if (rcond_out) *rcond_out = rcond;
  if (rcond < rcond_min) throw ConditioningError(rcond, rcond_min);
  Eigen::VectorXd x = lu.solve(b);
  if (!x.allFinite()) throw ConditioningError(0.0, rcond_min);
  return x;
}

}  // namespace gravinterp
