#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "hoc/grid.hpp"
#include "hoc/model.hpp"
#include "hoc/solver.hpp"
#include "hoc/stability.hpp"
#include "hoc/stencil.hpp"

namespace hoc {

struct StudyConfig {
  Scheme scheme = Scheme::kHoc;
  std::vector<double> ladder{0.4, 0.2, 0.1, 0.05};
  double reference_h = 0.025;
  std::vector<double> ratios{0.1, 0.5, 1.0, 2.0, 5.0, 10.0};
  std::vector<double> map_h{0.4, 0.2, 0.1, 0.05};
  std::vector<double> probe_S{80.0, 100.0, 120.0};
  std::vector<double> probe_sigma{0.1, 0.2};
  std::int64_t mc_paths = 200'000;
  int mc_steps = 250;
  std::uint64_t seed = 1;
  int threads = 1;
  std::int64_t samples = 1'000'000;
  int refine_starts = 8;
  std::vector<double> rho_sweep{-1.0, -0.75, -0.5, -0.25, 0.0};
  double vn_tolerance = 1e-10;
  SearchBox box;
  std::string out_dir = ".";

  bool operator==(const StudyConfig& o) const;
};

/// Everything a command needs. `grid.maturity` always mirrors `model.T`.
struct Config {
  ModelParams model;
  GridConfig grid;
  TimeLoopConfig time;
  StudyConfig study;

  bool operator==(const Config& o) const;
};

Config default_config();

/// INI text with sections [model], [grid], [time], [study]. Unknown
/// sections or keys and malformed values throw ConfigError.
Config parse_config(std::istream& is);
Config parse_config_string(const std::string& text);
Config load_config_file(const std::string& path);

/// Applies "section.key=value".
void apply_override(Config& cfg, const std::string& assignment);
void set_value(Config& cfg, const std::string& section, const std::string& key,
               const std::string& value);

std::string emit_config(const Config& cfg);

/// (section.key, value) in emission order; the basis of metadata headers.
std::vector<std::pair<std::string, std::string>> flatten(const Config& cfg);

/// Writes "# section.key = value" lines.
void write_metadata(std::ostream& os, const Config& cfg);

/// Rebuilds a Config from the "# section.key = value" lines at the top of
/// an output file; other comment lines ("# note = ...") are ignored only when
/// their key has no section prefix.
Config parse_metadata(std::istream& is);

/// Shortest decimal string that reads back to the same double.
std::string format_double(double x);

}  // namespace hoc
