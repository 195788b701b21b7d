#pragma once

// CSV output: sweep table, per-cell residual files and plot series.

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "gravinterp/errors.hpp"
#include "gravinterp/geodata.hpp"
#include "gravinterp/pipeline.hpp"

namespace gravinterp {

inline constexpr std::string_view kSweepHeader = "method,family,n,h,sigma_mgal,mean_mgal,failures";
inline constexpr std::string_view kResidualHeader =
    "query_index,lat_deg,lon_deg,observed_mgal,interpolated_mgal,residual_mgal,status";

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepResult>& results) {
  out << kSweepHeader << '\n';
  for (const auto& r : results) {
    out << r.method << ',' << r.family << ',' << r.n << ','
        << (r.h ? detail::format_double(*r.h) : std::string()) << ',' << detail::format_double(r.sigma)
        << ',' << detail::format_double(r.mean) << ',' << r.failures << '\n';
  }
}

inline std::vector<SweepResult> parse_sweep_csv(std::istream& in) {
  std::vector<SweepResult> out;
  std::string buffer;
  std::size_t line = 0;
  while (std::getline(in, buffer)) {
    ++line;
    const auto text = detail::trim(buffer);
    if (line == 1) {
      if (text != kSweepHeader) throw ParseError(line, "unexpected sweep header");
      continue;
    }
    if (text.empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest = text;
    while (true) {
      const auto comma = rest.find(',');
      f.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (f.size() != 7) throw ParseError(line, "expected 7 fields");
    const auto parse_count = [&](std::string_view s) {
      std::size_t v = 0;
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ParseError(line, "bad count '" + std::string(s) + "'");
      return v;
    };
    SweepResult r;
    r.method = std::string(f[0]);
    r.family = std::string(f[1]);
    r.n = parse_count(f[2]);
    if (!f[3].empty()) r.h = detail::parse_double(f[3], line, "h");
    r.sigma = detail::parse_double(f[4], line, "sigma_mgal");
    r.mean = detail::parse_double(f[5], line, "mean_mgal");
    r.failures = parse_count(f[6]);
    out.push_back(std::move(r));
  }
  return out;
}

inline void write_residuals_csv(std::ostream& out, const Dataset& dataset, const CellOutcome& outcome) {
  out << kResidualHeader << '\n';
  for (std::size_t i = 0; i < outcome.queries.size(); ++i) {
    const auto& q = dataset.queries[i];
    const auto& r = outcome.queries[i];
    out << dataset.query_source[i] << ',' << detail::format_double(rad2deg(q.latitude)) << ','
        << detail::format_double(rad2deg(q.longitude)) << ',' << detail::format_double(q.gravity) << ',';
    if (r.ok())
      out << detail::format_double(r.interpolated) << ',' << detail::format_double(r.interpolated - q.gravity)
          << ",ok\n";
    else
      out << ",," << r.failure << '\n';
  }
}

/// Plot series for one kernel: one row per h, one sigma column per n.
inline void write_kernel_series(std::ostream& out, const std::vector<SweepResult>& results,
                                std::string_view kernel) {
  std::set<std::size_t> ns;
  std::set<double> hs;
  std::map<std::pair<double, std::size_t>, double> sigma;
  for (const auto& r : results) {
    if (r.method != "cssrbf" || r.family != kernel || !r.h) continue;
    ns.insert(r.n);
    hs.insert(*r.h);
    sigma[{*r.h, r.n}] = r.sigma;
  }
  out << 'h';
  for (const auto n : ns) out << ",sigma_n" << n;
  out << '\n';
  for (const double h : hs) {
    out << detail::format_double(h);
    for (const auto n : ns) {
      out << ',';
      if (const auto it = sigma.find({h, n}); it != sigma.end()) out << detail::format_double(it->second);
    }
    out << '\n';
  }
}

/// Plot series for spherical-harmonic IMLS: sigma against degree J.
inline void write_harmonic_series(std::ostream& out, const std::vector<SweepResult>& results) {
  out << "J,n,sigma_mgal\n";
  for (const auto& r : results) {
    if (r.method != "imls" || !r.family.starts_with("sph:")) continue;
    out << r.family.substr(4) << ',' << r.n << ',' << detail::format_double(r.sigma) << '\n';
  }
}

inline std::vector<SweepResult> summaries(const std::vector<CellOutcome>& outcomes) {
  std::vector<SweepResult> out;
  out.reserve(outcomes.size());
  for (const auto& o : outcomes) out.push_back(o.summary);
  return out;
}

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path.string() + "' for writing");
  return f;
}

}  // namespace detail

/// Write sweep.csv, plot series for every kernel / harmonic family present,
/// and (optionally) one residual file per cell into `dir`.
inline void emit_report(const std::filesystem::path& dir, const Dataset& dataset,
                        const std::vector<CellOutcome>& outcomes, bool residuals) {
  if (outcomes.empty()) throw ArgumentError("emit_report: no results");
  std::filesystem::create_directories(dir);
  const auto results = summaries(outcomes);
  {
    auto f = detail::open_output(dir / "sweep.csv");
    write_sweep_csv(f, results);
  }
  std::set<std::string> kernels;
  bool harmonics = false;
  for (const auto& r : results) {
    if (r.method == "cssrbf") kernels.insert(r.family);
    if (r.method == "imls" && r.family.starts_with("sph:")) harmonics = true;
  }
  for (const auto& k : kernels) {
    auto f = detail::open_output(dir / ("plot_cssrbf_" + k + ".csv"));
    write_kernel_series(f, results, k);
  }
  if (harmonics) {
    auto f = detail::open_output(dir / "plot_imls_sph.csv");
    write_harmonic_series(f, results);
  }
  if (residuals) {
    for (const auto& o : outcomes) {
      auto f = detail::open_output(dir / ("residuals_" + o.cell.id() + ".csv"));
      write_residuals_csv(f, dataset, o);
    }
  }
}

/// Query selector from text: "bbox:lat_min,lat_max,lon_min,lon_max" (degrees)
/// or the path of a file with one 0-based observation index per line.
inline QuerySelector parse_query_selector(std::string_view text) {
  if (text.starts_with("bbox:")) {
    std::string_view rest = text.substr(5);
    double v[4];
    for (int k = 0; k < 4; ++k) {
      const auto comma = rest.find(',');
      if ((k < 3) == (comma == std::string_view::npos))
        throw ConfigError("bbox selector needs 4 comma-separated values");
      try {
        v[k] = detail::parse_double(rest.substr(0, comma), 1, "bbox");
      } catch (const ParseError&) {
        throw ConfigError("bad bbox value in '" + std::string(text) + "'");
      }
      if (comma != std::string_view::npos) rest.remove_prefix(comma + 1);
    }
    if (v[0] > v[1] || v[2] > v[3]) throw ConfigError("bbox bounds must satisfy min <= max");
    return BoundingBox{v[0], v[1], v[2], v[3]};
  }
  std::ifstream f{std::string(text)};
  if (!f) throw ConfigError("cannot read query index file '" + std::string(text) + "'");
  IndexSelection sel;
  std::string buffer;
  std::size_t line = 0;
  while (std::getline(f, buffer)) {
    ++line;
    auto s = detail::trim(buffer);
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = detail::trim(s.substr(0, hash));
    if (s.empty()) continue;
    std::size_t idx = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), idx);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw ConfigError("query index file line " + std::to_string(line) + ": bad index");
    sel.indices.push_back(idx);
  }
  return sel;
}

}  // namespace gravinterp
