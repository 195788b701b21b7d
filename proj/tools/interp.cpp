// interp: run or sweep IMLS / CSSRBF interpolation over point gravity data.
//
// Exit codes: 0 ok, 1 input/output error, 2 configuration error,
// 3 run with more than 10% failed queries.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "gravinterp/geodata.hpp"
#include "gravinterp/pipeline.hpp"
#include "gravinterp/report.hpp"
#include "gravinterp/synthetic.hpp"

namespace gi = gravinterp;

namespace {

constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;
constexpr int kExitFailures = 3;

struct CommonOptions {
  std::string input;
  std::string queries;
  std::string out;
  double ellipsoid_a = gi::Ellipsoid::wgs84().a;
  double ellipsoid_invf = gi::Ellipsoid::wgs84().inverse_flattening;
  double radius = gi::kMeanEarthRadius;
  double rcond_min = gi::kDefaultRcondMin;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--input", o.input, "Observation CSV (lat_deg,lon_deg,height_m,gravity_mgal)")->required();
  cmd->add_option("--queries", o.queries,
                  "Query selector: index file, or bbox:lat_min,lat_max,lon_min,lon_max")
      ->required();
  cmd->add_option("--out", o.out, "Output directory")->required();
  cmd->add_option("--ellipsoid-a", o.ellipsoid_a, "Ellipsoid semi-major axis, m")->capture_default_str();
  cmd->add_option("--ellipsoid-invf", o.ellipsoid_invf, "Ellipsoid inverse flattening (0 = sphere)")
      ->capture_default_str();
  cmd->add_option("--radius-R", o.radius, "Kernel sphere radius R, m")->capture_default_str();
  cmd->add_option("--rcond-min", o.rcond_min, "Reject local systems with reciprocal condition below this")
      ->capture_default_str();
  cmd->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::size_t parse_count(const std::string& s) {
  std::size_t pos = 0;
  unsigned long v = 0;
  try {
    v = std::stoul(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty() || s.front() == '-') throw gi::ConfigError("bad count '" + s + "'");
  return v;
}

double parse_real(const std::string& s) {
  try {
    return gi::detail::parse_double(s, 1, "number");
  } catch (const gi::ParseError&) {
    throw gi::ConfigError("bad number '" + s + "'");
  }
}

/// "lo:hi:step" or a comma list.
std::vector<double> parse_h_values(const std::string& text) {
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3) throw gi::ConfigError("h grid must be lo:hi:step");
    return gi::h_grid(parse_real(parts[0]), parse_real(parts[1]), parse_real(parts[2]));
  }
  std::vector<double> out;
  for (const auto& s : split_list(text)) out.push_back(parse_real(s));
  if (out.empty()) throw gi::ConfigError("empty h list");
  return out;
}

gi::Experiment load_experiment(const CommonOptions& o) {
  const gi::Ellipsoid ellipsoid{o.ellipsoid_a, o.ellipsoid_invf};
  ellipsoid.validate();
  std::ifstream in(o.input);
  if (!in) throw gi::Error("cannot open input '" + o.input + "'");
  const auto observations = gi::parse_observations(in);
  const auto selector = gi::parse_query_selector(o.queries);
  auto dataset = gi::split_dataset(observations, selector, ellipsoid);

  std::size_t outside = 0;
  for (const auto& s : dataset.known) outside += gi::within_surface_band(s.position, ellipsoid) ? 0 : 1;
  for (const auto& s : dataset.queries) outside += gi::within_surface_band(s.position, ellipsoid) ? 0 : 1;
  if (outside > 0)
    std::cerr << "warning: " << outside << " points lie more than 15 km from the ellipsoid surface\n";

  gi::Experiment exp(std::move(dataset));
  std::cerr << "known points: " << exp.dataset().known.size()
            << ", query points: " << exp.dataset().queries.size() << ", ell = " << exp.ell() << " m\n";
  if (const auto isolated = exp.isolated_queries(); !isolated.empty())
    std::cerr << "warning: " << isolated.size()
              << " query points are not well surrounded (nearest known point farther than twice the median)\n";
  return exp;
}

int run_command(const CommonOptions& o, const std::string& method, const std::string& basis,
                const std::string& kernel, const std::string& weight, const std::string& h_text,
                std::size_t n_opt) {
  const auto m = gi::parse_method(method);
  gi::CellSpec cell;
  switch (m) {
    case gi::Method::imls: {
      cell = gi::CellSpec::imls(gi::parse_basis(basis));
      if (n_opt != 0 && n_opt != cell.n)
        throw gi::ConfigError("IMLS with basis " + basis + " requires n=" + std::to_string(cell.n));
      break;
    }
    case gi::Method::mls: {
      const auto b = gi::parse_basis(basis);
      cell = gi::CellSpec::mls(b, gi::parse_weight(weight), n_opt != 0 ? n_opt : gi::basis_count(b));
      break;
    }
    case gi::Method::cssrbf: {
      if (h_text.empty()) throw gi::ConfigError("cssrbf requires --h");
      if (n_opt == 0) throw gi::ConfigError("cssrbf requires --n");
      cell = gi::CellSpec::cssrbf(gi::KernelSpec{gi::parse_kernel(kernel), parse_real(h_text), o.radius}, n_opt);
      break;
    }
  }
  cell.validate(std::numeric_limits<std::size_t>::max());

  auto exp = load_experiment(o);
  const auto outcome = exp.run_cell(cell, gi::RunOptions{o.rcond_min, o.threads});
  gi::emit_report(o.out, exp.dataset(), {outcome}, true);

  const auto& s = outcome.summary;
  std::cout << cell.id() << ": sigma=" << s.sigma << " mGal, mean=" << s.mean << " mGal, failures=" << s.failures
            << "/" << outcome.queries.size() << '\n';
  if (outcome.failure_fraction() > gi::kMaxFailureFraction) {
    std::cerr << "error: " << s.failures << " of " << outcome.queries.size() << " queries failed\n";
    return kExitFailures;
  }
  return 0;
}

gi::SweepGrid make_grid(const std::string& bases, const std::string& kernels, const std::string& ns,
                        const std::string& hs, double radius) {
  gi::SweepGrid grid;
  grid.imls_bases.clear();
  grid.harmonic_degrees.clear();
  for (const auto& b : split_list(bases)) {
    // sph:lo-hi expands to a degree range
    if (b.starts_with("sph:") && b.find('-') != std::string::npos) {
      const auto dash = b.find('-');
      const auto lo = static_cast<int>(parse_count(b.substr(4, dash - 4)));
      const auto hi = static_cast<int>(parse_count(b.substr(dash + 1)));
      if (lo > hi) throw gi::ConfigError("bad harmonic range '" + b + "'");
      for (int j = lo; j <= hi; ++j) grid.harmonic_degrees.push_back(j);
      continue;
    }
    const auto spec = gi::parse_basis(b);
    if (spec.is_monomial())
      grid.imls_bases.push_back(spec);
    else
      grid.harmonic_degrees.push_back(spec.degree);
  }
  grid.kernels.clear();
  for (const auto& k : split_list(kernels)) grid.kernels.push_back(gi::parse_kernel(k));
  grid.stencil_sizes.clear();
  for (const auto& n : split_list(ns)) grid.stencil_sizes.push_back(parse_count(n));
  grid.h_values = parse_h_values(hs);
  grid.radius = radius;
  return grid;
}

int sweep_command(const CommonOptions& o, const gi::SweepGrid& grid, bool residuals) {
  const auto cells = gi::sweep_cells(grid);
  if (cells.empty()) throw gi::ConfigError("sweep grid is empty");
  for (const auto& c : cells) c.validate(std::numeric_limits<std::size_t>::max());
  auto exp = load_experiment(o);
  const auto outcomes = exp.run_sweep(cells, gi::RunOptions{o.rcond_min, o.threads});
  gi::emit_report(o.out, exp.dataset(), outcomes, residuals);
  std::size_t heavy = 0;
  for (const auto& oc : outcomes) heavy += oc.failure_fraction() > gi::kMaxFailureFraction ? 1 : 0;
  std::cout << cells.size() << " cells written to " << (std::filesystem::path(o.out) / "sweep.csv").string();
  if (heavy > 0) std::cout << " (" << heavy << " cells with more than 10% failed queries)";
  std::cout << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Meshless interpolation of point gravity data (IMLS and CSSRBF)"};
  app.require_subcommand(1);
  // "--h" is a data option here, so help is long-form only.
  app.set_help_flag("--help", "Print this help message and exit");

  CommonOptions run_opts;
  std::string method, basis = "planar", kernel = "poisson", weight = "gaussian", h_text;
  std::size_t n_opt = 0;
  auto* run = app.add_subcommand("run", "Evaluate one configuration");
  run->set_help_flag("--help", "Print this help message and exit");
  add_common(run, run_opts);
  run->add_option("--method", method, "imls, mls or cssrbf")->required();
  run->add_option("--basis", basis, "planar, quadratic, cubic or sph:J")->capture_default_str();
  run->add_option("--kernel", kernel, "poisson, singularity or log")->capture_default_str();
  run->add_option("--weight", weight, "MLS weight: gaussian, spline or inverse")->capture_default_str();
  run->add_option("--h", h_text, "Band parameter in (0, 1) (cssrbf)");
  run->add_option("--n", n_opt, "Number of neighbors");

  CommonOptions sweep_opts;
  std::string sweep_bases = "planar,quadratic,cubic,sph:1-10";
  std::string sweep_kernels = "poisson,singularity,log";
  std::string sweep_ns = "4,10,20";
  std::string sweep_hs = "0.05:0.95:0.05";
  bool sweep_residuals = false;
  auto* sweep = app.add_subcommand("sweep", "Evaluate a parameter grid");
  sweep->set_help_flag("--help", "Print this help message and exit");
  add_common(sweep, sweep_opts);
  sweep->add_option("--basis", sweep_bases, "IMLS bases; sph:lo-hi expands to a degree range")
      ->capture_default_str();
  sweep->add_option("--kernel", sweep_kernels, "CSSRBF kernels (empty to skip)")->capture_default_str();
  sweep->add_option("--n", sweep_ns, "CSSRBF neighbor counts")->capture_default_str();
  sweep->add_option("--h", sweep_hs, "Band parameters: lo:hi:step or a comma list")->capture_default_str();
  sweep->add_flag("--residuals", sweep_residuals, "Also write residuals_<cell>.csv for every cell");

  gi::SyntheticOptions synth_opts;
  std::string synth_out, synth_queries;
  std::size_t synth_stride = 6;
  auto* synth = app.add_subcommand("synth", "Write a synthetic observation CSV");
  synth->set_help_flag("--help", "Print this help message and exit");
  synth->add_option("--out", synth_out, "Output CSV")->required();
  synth->add_option("--queries-out", synth_queries, "Also write a query index file (every stride-th point)");
  synth->add_option("--stride", synth_stride, "Query stride")->capture_default_str()->check(CLI::PositiveNumber);
  synth->add_option("--count", synth_opts.count, "Number of points")->capture_default_str();
  synth->add_option("--seed", synth_opts.seed, "Random seed")->capture_default_str();
  synth->add_option("--lat-min", synth_opts.lat_min)->capture_default_str();
  synth->add_option("--lat-max", synth_opts.lat_max)->capture_default_str();
  synth->add_option("--lon-min", synth_opts.lon_min)->capture_default_str();
  synth->add_option("--lon-max", synth_opts.lon_max)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return run_command(run_opts, method, basis, kernel, weight, h_text, n_opt);
    if (*sweep) {
      const auto grid = make_grid(sweep_bases, sweep_kernels, sweep_ns, sweep_hs, sweep_opts.radius);
      return sweep_command(sweep_opts, grid, sweep_residuals);
    }
    if (*synth) {
      const auto obs = gi::synthetic_observations(synth_opts);
      std::ofstream f(synth_out, std::ios::binary);
      if (!f) throw gi::Error("cannot open '" + synth_out + "'");
      gi::write_observations(f, obs);
      if (!synth_queries.empty()) {
        std::ofstream q(synth_queries, std::ios::binary);
        if (!q) throw gi::Error("cannot open '" + synth_queries + "'");
        for (const auto i : gi::every_nth(obs.size(), synth_stride).indices) q << i << '\n';
      }
      return 0;
    }
  } catch (const gi::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const gi::ArgumentError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return 0;
}
