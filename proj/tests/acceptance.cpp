// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <Eigen/Geometry>
#include <array>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "gravinterp/pipeline.hpp"
#include "gravinterp/report.hpp"
#include "gravinterp/stats.hpp"
#include "gravinterp/synthetic.hpp"
#include "oracles.hpp"

using namespace gravinterp;
namespace fs = std::filesystem;

namespace {

constexpr double kR = kMeanEarthRadius;
const KernelFamily kFamilies[] = {KernelFamily::poisson, KernelFamily::singularity, KernelFamily::logarithmic};

struct Verdict {
  bool ok = true;
  std::string detail;
};

/// Collects the first few mismatches so the summary line stays short.
struct Checker {
  bool ok = true;
  std::size_t failures = 0;
  std::ostringstream first;
  void expect(bool cond, const std::string& what) {
    if (cond) return;
    ok = false;
    if (failures++ == 0) first << what;
  }
  Verdict verdict(const std::string& summary) const {
    std::string d = summary;
    if (!ok) d += "; " + std::to_string(failures) + " mismatches, first: " + first.str();
    return {ok, d};
  }
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

// 1
Verdict counting_formulas() {
  Checker c;
  c.expect(basis_count(BasisSpec::planar()) == 4, "planar");
  c.expect(basis_count(BasisSpec::quadratic()) == 10, "quadratic");
  c.expect(basis_count(BasisSpec::cubic()) == 20, "cubic");
  for (int j = 0; j <= 10; ++j) {
    c.expect(basis_count(BasisSpec::spherical_harmonics(j)) == std::size_t((j + 1) * (j + 1)),
             "sph:" + std::to_string(j));
    c.expect(spherical_harmonic_row(0.3, 0.7, j).size() == std::size_t((j + 1) * (j + 1)),
             "row length sph:" + std::to_string(j));
  }
  c.expect(basis_count(BasisSpec::spherical_harmonics(10)) == 121, "sph:10");
  return c.verdict("4/10/20 and (J+1)^2 for J=0..10");
}

// 2
Verdict interpolation_property() {
  // Sparse global data: stencils of up to 121 points span wide caps.
  const auto obs = synthetic_observations(SyntheticOptions{.count = 150, .seed = 21});
  const auto ds = split_dataset(obs, every_nth(obs.size(), 6));
  Experiment exp(ds);
  const auto& known = ds.known;

  std::mt19937_64 rng(22);
  std::uniform_int_distribution<std::size_t> pick(0, known.size() - 1);
  std::uniform_int_distribution<int> method(0, 1), family(0, 3), kernel(0, 2), degree(1, 10), choice(0, 2);
  const BasisSpec monomials[] = {BasisSpec::planar(), BasisSpec::quadratic(), BasisSpec::cubic()};
  const double hs[] = {0.1, 0.5, 0.9};
  const std::size_t ns[] = {4, 10, 20};

  Checker c;
  std::map<std::string, std::pair<int, int>> tally;  // family -> (drawn, gated)
  std::size_t gated = 0;
  constexpr std::size_t configs = 200;
  for (std::size_t k = 0; k < configs; ++k) {
    CellSpec cell;
    if (method(rng) == 0) {
      const int f = family(rng);
      cell = CellSpec::imls(f < 3 ? monomials[f] : BasisSpec::spherical_harmonics(degree(rng)));
    } else {
      const auto f = kFamilies[kernel(rng)];
      const double h = hs[choice(rng)];
      cell = CellSpec::cssrbf({f, h, kR}, ns[choice(rng)]);
    }
    const std::string key = cell.method == Method::imls && !cell.basis.is_monomial() ? "sph" : cell.family();
    ++tally[key].first;
    const auto& q = known[pick(rng)];
    const auto nb = exp.index().k_nearest(q.position, cell.n);
    try {
      const double v = cell.method == Method::imls ? imls_interpolate(q, nb, known, cell.basis, exp.ell())
                                                   : cssrbf_interpolate(q, nb, known, cell.kernel);
      c.expect(oracle::rel_err(v, q.gravity) <= 1e-8, cell.id() + " rel err " + fmt(oracle::rel_err(v, q.gravity)));
    } catch (const ConditioningError&) {
      ++gated;
      ++tally[key].second;
    }
  }
  c.expect(gated * 20 < configs, "gate hits " + std::to_string(gated) + " >= 5%");
  std::string per;
  for (const auto& [name, t] : tally)
    per += " " + name + " " + std::to_string(t.second) + "/" + std::to_string(t.first);
  return c.verdict(std::to_string(configs) + " configurations on " + std::to_string(known.size()) +
                   " known points, gated:" + per);
}

// 3
Verdict polynomial_reproduction() {
  std::mt19937_64 rng(31);
  const double half = 5000.0, ell = 600.0;
  const auto cloud = oracle::random_cloud(rng, 2000, half);
  const SpatialIndex index(cloud);
  Checker c;
  for (const int v : {1, 2, 3}) {
    // Random degree-v polynomial in coordinates scaled by ell about a fixed origin.
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::vector<double> a(basis_count(v));
    for (auto& x : a) x = coef(rng);
    const CartesianPoint origin{300.0, -150.0, 80.0};
    const auto field = [&](const Station& s) {
      const auto row = monomial_row(scale_coordinates(s.position, origin, ell), v);
      double f = 0.0;
      for (std::size_t t = 0; t < row.size(); ++t) f += a[t] * row[t];
      return f;
    };
    const auto known = fixtures::stations_at(cloud, field);
    const auto spec = std::array{BasisSpec::planar(), BasisSpec::quadratic(), BasisSpec::cubic()}[v - 1];
    for (const auto& qp : oracle::random_cloud(rng, 100, 0.8 * half)) {
      const auto q = fixtures::stations_at({qp}, field)[0];
      try {
        const double got = imls_interpolate(q, index.k_nearest(qp, basis_count(v)), known, spec, ell);
        const double err = std::abs(got - q.gravity) / std::max(1.0, std::abs(q.gravity));
        c.expect(err <= 1e-7, to_string(spec) + " rel err " + fmt(err));
      } catch (const Error& e) {
        c.expect(false, to_string(spec) + " " + e.what());
      }
    }
  }
  return c.verdict("planar/quadratic/cubic, 100 queries each");
}

// 4
Verdict kernel_closed_forms() {
  Checker c;
  const CartesianPoint a{kR * 0.6, kR * 0.48, kR * 0.64};
  const double pi = std::numbers::pi;
  for (const double h : default_h_grid()) {
    const double want[] = {(1 + h) / (4 * pi * kR * kR * (1 - h) * (1 - h)), 1 / (2 * pi * kR * kR * (1 - h)),
                           -std::log(1 - h) / (4 * pi * kR * kR)};
    for (int k = 0; k < 3; ++k) {
      const double got = kernel_value(a, a, {kFamilies[k], h, kR});
      c.expect(oracle::rel_err(got, want[k]) <= 1e-12, to_string(kFamilies[k]) + " h=" + fmt(h));
    }
  }
  return c.verdict("3 kernels x 19 h values");
}

// 5
Verdict kernel_symmetry() {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> hd(0.05, 0.95), ang(-std::numbers::pi, std::numbers::pi), u(-1, 1);
  Checker c;
  double worst_sym = 0, worst_rot = 0;
  constexpr int pairs = 10000;
  for (const auto f : kFamilies) {
    const auto pts = fixtures::sphere_points(rng, 2 * pairs, kR, 3000.0);
    for (int i = 0; i < pairs; ++i) {
      const auto& p = pts[2 * i];
      const auto& q = pts[2 * i + 1];
      const KernelSpec spec{f, hd(rng), kR};
      const Eigen::Matrix3d rot =
          Eigen::AngleAxisd(ang(rng), Eigen::Vector3d(u(rng), u(rng), u(rng) + 2.0).normalized()).toRotationMatrix();
      const auto rotate = [&](const CartesianPoint& x) {
        const Eigen::Vector3d v = rot * Eigen::Vector3d(x.x, x.y, x.z);
        return CartesianPoint{v.x(), v.y(), v.z()};
      };
      const double pq = kernel_value(p, q, spec);
      const double sym = oracle::rel_err(kernel_value(q, p, spec), pq);
      const double rotd = oracle::rel_err(kernel_value(rotate(p), rotate(q), spec), pq);
      worst_sym = std::max(worst_sym, sym);
      worst_rot = std::max(worst_rot, rotd);
      c.expect(sym <= 1e-13, to_string(f) + " symmetry " + fmt(sym));
      c.expect(rotd <= 1e-12, to_string(f) + " rotation " + fmt(rotd));
    }
  }
  return c.verdict("3 x 10^4 pairs, worst symmetry " + fmt(worst_sym) + ", worst rotation " + fmt(worst_rot));
}

// 6
Verdict neighbor_oracle() {
  std::mt19937_64 rng(61);
  std::uniform_int_distribution<std::size_t> size(121, 2000);
  Checker c;
  for (int inst = 0; inst < 50; ++inst) {
    const std::size_t n = inst == 0 ? 2000 : size(rng);
    std::vector<CartesianPoint> pts;
    if (inst % 5 == 4) {
      // Integer lattice with repeats: many exact distance ties.
      std::uniform_int_distribution<int> cell(-4, 4);
      for (std::size_t i = 0; i < n; ++i) pts.push_back({double(cell(rng)), double(cell(rng)), double(cell(rng))});
    } else {
      pts = oracle::random_cloud(rng, n, 1e4);
    }
    const SpatialIndex index(pts);
    auto queries = oracle::random_cloud(rng, 10, 1.2e4);
    queries.push_back(pts[n / 2]);
    queries.push_back({0.0, 0.0, 0.0});
    for (const auto& q : queries)
      for (const std::size_t k : {1u, 4u, 10u, 20u, 121u}) {
        const auto got = index.k_nearest(q, k);
        const auto want = oracle::brute_knn(pts, q, k);
        bool same = got.indices.size() == k;
        for (std::size_t i = 0; same && i < k; ++i)
          same = got.indices[i] == want[i].second && got.distances[i] == want[i].first;
        same = same && got.delta == got.distances.back();
        c.expect(same, "instance " + std::to_string(inst) + " k=" + std::to_string(k));
      }
  }
  return c.verdict("50 instances of 121..2000 points, k in {1,4,10,20,121}");
}

// 7
Verdict geodetic_conversion() {
  Checker c;
  const auto e = Ellipsoid::wgs84();
  const double b = e.semi_minor_axis();
  const auto at = [&](double lat, double lon, double h) {
    return geodetic_to_cartesian(GeodeticCoords{deg2rad(lat), deg2rad(lon), h}, e);
  };
  const auto close = [&](const CartesianPoint& p, const CartesianPoint& q, const std::string& what) {
    c.expect(distance(p, q) <= 1e-6, what + " off by " + fmt(distance(p, q)) + " m");
  };
  close(at(0, 0, 0), {e.a, 0, 0}, "equator lon 0");
  close(at(0, 90, 0), {0, e.a, 0}, "equator lon 90");
  close(at(0, 180, 0), {-e.a, 0, 0}, "equator lon 180");
  close(at(0, 0, 1234.5), {e.a + 1234.5, 0, 0}, "equator with height");
  close(at(90, 0, 0), {0, 0, b}, "north pole");
  close(at(-90, 45, 0), {0, 0, -b}, "south pole");
  close(at(90, 0, 2000), {0, 0, b + 2000}, "pole with height");

  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> lat(-90, 90), lon(-180, 180), h(-1000, 10000);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto p = at(lat(rng), lon(rng), h(rng));
    const auto g = cartesian_to_geodetic(p, e);
    const double d = distance(geodetic_to_cartesian(g, e), p);
    worst = std::max(worst, d);
    c.expect(d <= 1e-4, "round trip off by " + fmt(d) + " m");
  }
  return c.verdict("7 closed-form cases, 10^3 round trips, worst " + fmt(worst) + " m");
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// 8
Verdict pipeline_determinism() {
  const auto obs = synthetic_observations(SyntheticOptions{.count = 600, .seed = 81});
  const auto ds = split_dataset(obs, every_nth(obs.size(), 6));
  Checker c;
  c.expect(ds.known.size() == 500 && ds.queries.size() == 100, "split is not 500/100");
  const auto cells = sweep_cells(SweepGrid{});
  const auto root = fs::temp_directory_path() / "gravinterp_acceptance";
  fs::remove_all(root);
  std::vector<fs::path> dirs;
  for (const unsigned threads : {1u, 4u, 8u}) {
    Experiment exp(ds);
    const auto dir = root / ("threads" + std::to_string(threads));
    emit_report(dir, exp.dataset(), exp.run_sweep(cells, RunOptions{.threads = threads}), true);
    dirs.push_back(dir);
  }
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(dirs[0])) {
    ++files;
    const auto name = entry.path().filename();
    const auto ref = slurp(entry.path());
    for (std::size_t k = 1; k < dirs.size(); ++k)
      c.expect(fs::exists(dirs[k] / name) && slurp(dirs[k] / name) == ref, name.string() + " differs");
  }
  for (std::size_t k = 1; k < dirs.size(); ++k)
    c.expect(std::distance(fs::directory_iterator(dirs[k]), fs::directory_iterator{}) == std::ptrdiff_t(files),
             "file count differs");
  std::ifstream sweep(dirs[0] / "sweep.csv");
  const auto rows = parse_sweep_csv(sweep);
  c.expect(rows.size() == cells.size(), "sweep.csv row count");
  std::size_t finite = 0;
  for (const auto& r : rows) finite += std::isfinite(r.sigma);
  fs::remove_all(root);
  return c.verdict(std::to_string(cells.size()) + " cells, " + std::to_string(files) +
                   " files identical across 1/4/8 threads, " + std::to_string(finite) + " finite sigma rows");
}

// 9
Verdict statistics_oracle() {
  std::mt19937_64 rng(91);
  std::normal_distribution<double> g(-3.7, 31.0);
  std::vector<double> v(100000);
  for (auto& x : v) x = g(rng);
  const auto [mean, sigma] = oracle::two_pass(v);
  const auto s = residual_sigma(v);
  Checker c;
  c.expect(oracle::rel_err(s.sigma, sigma) <= 1e-12, "sigma rel err " + fmt(oracle::rel_err(s.sigma, sigma)));
  c.expect(oracle::rel_err(s.mean, mean) <= 1e-12, "mean rel err " + fmt(oracle::rel_err(s.mean, mean)));
  return c.verdict("10^5 values, sigma rel err " + fmt(oracle::rel_err(s.sigma, sigma)));
}

// 10
std::optional<Verdict> real_data_smoke() {
  const char* csv = std::getenv("GRAVINTERP_REAL_CSV");
  const char* sel = std::getenv("GRAVINTERP_REAL_QUERIES");
  if (!csv || !sel) return std::nullopt;
  std::ifstream in(csv);
  if (!in) return Verdict{false, std::string("cannot open ") + csv};
  Experiment exp(split_dataset(parse_observations(in), parse_query_selector(sel)));
  SweepGrid grid;
  grid.h_values = {0.2, 0.5, 0.8};
  Checker c;
  double lo = 1e300, hi = 0;
  for (const auto& r : summaries(exp.run_sweep(sweep_cells(grid), RunOptions{.threads = 4}))) {
    if (!std::isfinite(r.sigma)) continue;
    lo = std::min(lo, r.sigma);
    hi = std::max(hi, r.sigma);
  }
  c.expect(lo >= 1.0 && lo <= 1000.0, "smallest sigma " + fmt(lo) + " mGal");
  return c.verdict(std::to_string(exp.dataset().known.size()) + "/" + std::to_string(exp.dataset().queries.size()) +
                   " split, sigma " + fmt(lo) + ".." + fmt(hi) + " mGal");
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Verdict()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "counting formulas", 1.0, counting_formulas},
      {2, "interpolation property", 30.0, interpolation_property},
      {3, "polynomial reproduction", 30.0, polynomial_reproduction},
      {4, "kernel closed forms", 1.0, kernel_closed_forms},
      {5, "kernel symmetry and rotation invariance", 10.0, kernel_symmetry},
      {6, "neighbor search oracle", 30.0, neighbor_oracle},
      {7, "geodetic conversion", 5.0, geodetic_conversion},
      {8, "pipeline determinism", 120.0, pipeline_determinism},
      {9, "statistics oracle", 1.0, statistics_oracle},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = cr.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > cr.limit_s) {
      v.ok = false;
      v.detail += "; exceeded " + fmt(cr.limit_s) + " s";
    }
    failed += !v.ok;
    std::cout << "AC" << cr.id << (cr.id < 10 ? "  " : " ") << (v.ok ? "PASS" : "FAIL") << "  " << cr.name << ": "
              << v.detail << " (" << fmt(secs) << " s)" << std::endl;
  }
  const auto t0 = std::chrono::steady_clock::now();
  std::optional<Verdict> smoke;
  try {
    smoke = real_data_smoke();
  } catch (const std::exception& e) {
    smoke = Verdict{false, std::string("exception: ") + e.what()};
  }
  if (!smoke) {
    std::cout << "AC10 SKIP  real-data smoke check: set GRAVINTERP_REAL_CSV and GRAVINTERP_REAL_QUERIES to run"
              << std::endl;
  } else {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "AC10 " << (smoke->ok ? "PASS" : "FAIL") << "  real-data smoke check (not gating): " << smoke->detail
              << " (" << fmt(secs) << " s)" << std::endl;
  }
  std::cout << (failed ? "FAILED: " + std::to_string(failed) + " criteria" : std::string("all gating criteria passed"))
            << std::endl;
  return failed ? 1 : 0;
}
