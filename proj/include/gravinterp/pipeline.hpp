#pragma once

// Evaluation pipeline: neighbor search for every query point, local solve,
// residual statistics per configuration cell, and parameter sweeps.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gravinterp/basis.hpp"
#include "gravinterp/cssrbf.hpp"
#include "gravinterp/errors.hpp"
#include "gravinterp/geodata.hpp"
#include "gravinterp/imls.hpp"
#include "gravinterp/neighbors.hpp"
#include "gravinterp/parallel.hpp"
#include "gravinterp/stats.hpp"

namespace gravinterp {

enum class Method { imls, mls, cssrbf };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::imls: return "imls";
    case Method::mls: return "mls";
    case Method::cssrbf: return "cssrbf";
  }
  return {};
}

inline Method parse_method(std::string_view text) {
  if (text == "imls") return Method::imls;
  if (text == "mls") return Method::mls;
  if (text == "cssrbf") return Method::cssrbf;
  throw ConfigError("unknown method '" + std::string(text) + "' (expected imls, mls or cssrbf)");
}

/// One configuration of the comparison: method, basis or kernel, stencil size.
struct CellSpec {
  Method method = Method::imls;
  BasisSpec basis;
  KernelSpec kernel;
  WeightSpec weight;
  std::size_t n = 0;

  static CellSpec imls(const BasisSpec& basis) {
    CellSpec c;
    c.method = Method::imls;
    c.basis = basis;
    c.n = basis_count(basis);
    return c;
  }
  static CellSpec mls(const BasisSpec& basis, const WeightSpec& weight, std::size_t n) {
    CellSpec c;
    c.method = Method::mls;
    c.basis = basis;
    c.weight = weight;
    c.n = n;
    return c;
  }
  static CellSpec cssrbf(const KernelSpec& kernel, std::size_t n) {
    CellSpec c;
    c.method = Method::cssrbf;
    c.kernel = kernel;
    c.n = n;
    return c;
  }

  std::string family() const {
    return method == Method::cssrbf ? to_string(kernel.family) : to_string(basis);
  }

  std::optional<double> h() const {
    if (method == Method::cssrbf) return kernel.h;
    return std::nullopt;
  }

  /// File-name-safe identifier, e.g. imls_sph8_n81 or cssrbf_poisson_n20_h0.8.
  std::string id() const {
    std::string fam = family();
    std::erase(fam, ':');
    std::string out = to_string(method) + "_" + fam + "_n" + std::to_string(n);
    if (const auto hv = h()) out += "_h" + detail::format_double(*hv);
    return out;
  }

  void validate(std::size_t known_count) const {
    if (n < 1) throw ConfigError("stencil size n must be >= 1");
    if (n > known_count)
      throw ConfigError("stencil size n=" + std::to_string(n) + " exceeds the " +
                        std::to_string(known_count) + " known points");
    switch (method) {
      case Method::imls:
      case Method::mls: {
        if (basis.is_monomial() && (basis.degree < 1 || basis.degree > 3))
          throw ConfigError("monomial degree must be 1, 2 or 3");
        if (!basis.is_monomial() && basis.degree < 0) throw ConfigError("harmonic degree must be >= 0");
        const auto m = basis_count(basis);
        if (method == Method::imls && n != m)
          throw ConfigError("IMLS with basis " + to_string(basis) + " requires n=" + std::to_string(m) +
                            ", got n=" + std::to_string(n));
        if (method == Method::mls && n < m)
          throw ConfigError("MLS with basis " + to_string(basis) + " requires n>=" + std::to_string(m));
        break;
      }
      case Method::cssrbf: kernel.validate(); break;
    }
  }
};

/// Per-query outcome. `failure` is empty on success, otherwise the reason.
struct QueryResult {
  double interpolated = std::numeric_limits<double>::quiet_NaN();
  std::string failure;
  bool ok() const { return failure.empty(); }
};

/// One row of the sweep table.
struct SweepResult {
  std::string method;
  std::string family;
  std::size_t n = 0;
  std::optional<double> h;
  /// NaN when fewer than two queries succeeded.
  double sigma = std::numeric_limits<double>::quiet_NaN();
  double mean = std::numeric_limits<double>::quiet_NaN();
  std::size_t failures = 0;

  friend bool operator==(const SweepResult& a, const SweepResult& b) {
    const auto same = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
    return a.method == b.method && a.family == b.family && a.n == b.n && a.h == b.h &&
           same(a.sigma, b.sigma) && same(a.mean, b.mean) && a.failures == b.failures;
  }
};

struct CellOutcome {
  CellSpec cell;
  SweepResult summary;
  std::vector<QueryResult> queries;
  std::size_t successes = 0;

  double failure_fraction() const {
    return queries.empty() ? 0.0 : static_cast<double>(summary.failures) / static_cast<double>(queries.size());
  }
};

struct RunOptions {
  double rcond_min = kDefaultRcondMin;
  unsigned threads = 1;
};

/// Fraction of failed queries above which a single run is reported as failed.
inline constexpr double kMaxFailureFraction = 0.10;

namespace detail {

inline std::vector<CartesianPoint> positions(std::span<const Station> stations) {
  std::vector<CartesianPoint> out;
  out.reserve(stations.size());
  for (const auto& s : stations) out.push_back(s.position);
  return out;
}

inline std::string failure_reason(const Error& e) {
  if (dynamic_cast<const ConditioningError*>(&e)) return "conditioning";
  if (dynamic_cast<const KernelDomainError*>(&e)) return "kernel-domain";
  if (dynamic_cast<const DegenerateScaleError*>(&e)) return "degenerate-scale";
  return "error";
}

}  // namespace detail

/// A split dataset with its spatial index and global scale parameter ell.
/// Neighbor sets are computed once per stencil size and reused across cells.
class Experiment {
 public:
  explicit Experiment(Dataset dataset)
      : dataset_(std::move(dataset)),
        known_positions_(detail::positions(dataset_.known)),
        query_positions_(detail::positions(dataset_.queries)),
        index_(known_positions_) {
    if (dataset_.queries.empty()) throw ConfigError("dataset has no query points");
    ell_ = fill_distance(index_, query_positions_);
  }

  const Dataset& dataset() const { return dataset_; }
  const SpatialIndex& index() const { return index_; }
  double ell() const { return ell_; }

  const std::vector<NeighborSet>& neighbor_sets(std::size_t n, unsigned threads = 1) {
    auto it = neighbor_cache_.find(n);
    if (it != neighbor_cache_.end()) return it->second;
    std::vector<NeighborSet> sets(dataset_.queries.size());
    parallel_for(sets.size(), threads,
                 [&](std::size_t i) { sets[i] = index_.k_nearest(query_positions_[i], n); });
    return neighbor_cache_.emplace(n, std::move(sets)).first->second;
  }

  /// Queries whose nearest known point is farther than `factor` times the
  /// median nearest-known distance over all queries.
  std::vector<std::size_t> isolated_queries(double factor = 2.0) {
    const auto& nearest = neighbor_sets(1);
    std::vector<double> d;
    d.reserve(nearest.size());
    for (const auto& s : nearest) d.push_back(s.delta);
    auto sorted = d;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2),
                     sorted.end());
    const double median = sorted[sorted.size() / 2];
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < d.size(); ++i)
      if (d[i] > factor * median) out.push_back(i);
    return out;
  }

  double interpolate(const CellSpec& cell, std::size_t query, const NeighborSet& neighbors,
                     double rcond_min) const {
    const auto& q = dataset_.queries[query];
    switch (cell.method) {
      case Method::imls:
        return imls_interpolate(q, neighbors, dataset_.known, cell.basis, ell_, rcond_min);
      case Method::mls:
        return mls_approximate(q, neighbors, dataset_.known, cell.basis, cell.weight, ell_, rcond_min);
      case Method::cssrbf:
        return cssrbf_interpolate(q, neighbors, dataset_.known, cell.kernel, rcond_min);
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

  CellOutcome run_cell(const CellSpec& cell, const RunOptions& options) {
    cell.validate(dataset_.known.size());
    const auto& sets = neighbor_sets(cell.n, options.threads);

    CellOutcome out;
    out.cell = cell;
    out.queries.resize(dataset_.queries.size());
    parallel_for(out.queries.size(), options.threads, [&](std::size_t i) {
      try {
        out.queries[i].interpolated = interpolate(cell, i, sets[i], options.rcond_min);
      } catch (const ConditioningError& e) {
        out.queries[i].failure = detail::failure_reason(e);
      } catch (const KernelDomainError& e) {
        out.queries[i].failure = detail::failure_reason(e);
      } catch (const DegenerateScaleError& e) {
        out.queries[i].failure = detail::failure_reason(e);
      }
    });

    std::vector<double> residuals;
    residuals.reserve(out.queries.size());
    for (std::size_t i = 0; i < out.queries.size(); ++i)
      if (out.queries[i].ok()) residuals.push_back(out.queries[i].interpolated - dataset_.queries[i].gravity);

    out.successes = residuals.size();
    auto& s = out.summary;
    s.method = to_string(cell.method);
    s.family = cell.family();
    s.n = cell.n;
    s.h = cell.h();
    s.failures = out.queries.size() - residuals.size();
    if (residuals.size() >= 2) {
      const auto stats = residual_sigma(residuals);
      s.sigma = stats.sigma;
      s.mean = stats.mean;
    }
    return out;
  }

  std::vector<CellOutcome> run_sweep(const std::vector<CellSpec>& cells, const RunOptions& options) {
    for (const auto& c : cells) c.validate(dataset_.known.size());
    std::vector<CellOutcome> out;
    out.reserve(cells.size());
    for (const auto& c : cells) out.push_back(run_cell(c, options));
    return out;
  }

 private:
  Dataset dataset_;
  std::vector<CartesianPoint> known_positions_;
  std::vector<CartesianPoint> query_positions_;
  SpatialIndex index_;
  double ell_ = 0.0;
  std::map<std::size_t, std::vector<NeighborSet>> neighbor_cache_;
};

/// Band-parameter grid lo, lo+step, ..., hi. Values are rounded to 1e-9 so
/// that e.g. 0.15 prints as 0.15 rather than 0.15000000000000002.
inline std::vector<double> h_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw ConfigError("invalid h grid");
  const auto count = static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1;
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k)
    out.push_back(std::round((lo + static_cast<double>(k) * step) * 1e9) / 1e9);
  return out;
}

inline std::vector<double> default_h_grid() { return h_grid(0.05, 0.95, 0.05); }

struct SweepGrid {
  std::vector<BasisSpec> imls_bases = {BasisSpec::planar(), BasisSpec::quadratic(), BasisSpec::cubic()};
  /// Spherical-harmonic IMLS degrees J.
  std::vector<int> harmonic_degrees = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<KernelFamily> kernels = {KernelFamily::poisson, KernelFamily::singularity,
                                       KernelFamily::logarithmic};
  std::vector<std::size_t> stencil_sizes = {4, 10, 20};
  std::vector<double> h_values = default_h_grid();
  double radius = kMeanEarthRadius;
};

/// Cells in fixed order: monomial IMLS, harmonic IMLS by J, then CSSRBF
/// kernel x n x h.
inline std::vector<CellSpec> sweep_cells(const SweepGrid& grid) {
  std::vector<CellSpec> cells;
  for (const auto& b : grid.imls_bases) cells.push_back(CellSpec::imls(b));
  for (const int j : grid.harmonic_degrees) cells.push_back(CellSpec::imls(BasisSpec::spherical_harmonics(j)));
  for (const auto k : grid.kernels)
    for (const auto n : grid.stencil_sizes)
      for (const double h : grid.h_values) cells.push_back(CellSpec::cssrbf(KernelSpec{k, h, grid.radius}, n));
  return cells;
}

}  // namespace gravinterp
