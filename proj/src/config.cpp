#include "hoc/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>

#include "hoc/error.hpp"

namespace hoc {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* what) {
  throw ConfigError("invalid value '" + value + "' for " + key + " (expected " + what + ")");
}

double to_double(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size())
    bad_value(key, raw, "a number");
  return x;
}

template <class Int>
Int to_int(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  Int x = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size())
    bad_value(key, raw, "an integer");
  return x;
}

bool to_bool(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1" || s == "on" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "off" || s == "no") return false;
  bad_value(key, raw, "true/false");
}

std::vector<double> to_list(const std::string& key, const std::string& raw) {
  std::vector<double> out;
  std::stringstream ss(raw);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(to_double(key, item));
  if (out.empty()) bad_value(key, raw, "a comma separated list");
  return out;
}

Interval to_interval(const std::string& key, const std::string& raw) {
  const auto v = to_list(key, raw);
  if (v.size() != 2 || v[0] > v[1]) bad_value(key, raw, "'lo,hi' with lo <= hi");
  return {v[0], v[1]};
}

std::string list_str(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

std::string interval_str(const Interval& i) { return format_double(i.lo) + "," + format_double(i.hi); }

std::string offset_str(OffsetMode m) {
  switch (m) {
    case OffsetMode::kNone: return "none";
    case OffsetMode::kHalfCell: return "half";
    case OffsetMode::kExplicit: return "explicit";
  }
  return "half";
}

struct Entry {
  const char* section;
  const char* key;
  std::function<std::string(const Config&)> get;
  std::function<void(Config&, const std::string&, const std::string&)> set;
};

#define HOC_DOUBLE(sec, name, field)                                                    \
  Entry{sec, name, [](const Config& c) { return format_double(c.field); },               \
        [](Config& c, const std::string& k, const std::string& v) { c.field = to_double(k, v); }}
#define HOC_INTERVAL(name, field)                                                       \
  Entry{"study", name, [](const Config& c) { return interval_str(c.study.box.field); },  \
        [](Config& c, const std::string& k, const std::string& v) {                     \
          c.study.box.field = to_interval(k, v);                                        \
        }}
#define HOC_LIST(name, field)                                                           \
  Entry{"study", name, [](const Config& c) { return list_str(c.study.field); },          \
        [](Config& c, const std::string& k, const std::string& v) { c.study.field = to_list(k, v); }}

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = {
      HOC_DOUBLE("model", "r", model.r),
      HOC_DOUBLE("model", "v", model.v),
      HOC_DOUBLE("model", "kappa_star", model.kappa_star),
      HOC_DOUBLE("model", "theta_star", model.theta_star),
      HOC_DOUBLE("model", "lambda0", model.lambda0),
      HOC_DOUBLE("model", "rho", model.rho),
      HOC_DOUBLE("model", "K", model.K),
      HOC_DOUBLE("model", "T", model.T),

      HOC_DOUBLE("grid", "h", grid.h),
      HOC_DOUBLE("grid", "x_half_width", grid.x_half_width),
      HOC_DOUBLE("grid", "y_min", grid.y_min),
      HOC_DOUBLE("grid", "y_max", grid.y_max),
      Entry{"grid", "offset_mode", [](const Config& c) { return offset_str(c.grid.offset_mode); },
            [](Config& c, const std::string& k, const std::string& v) {
              const auto s = trim(v);
              if (s == "none") c.grid.offset_mode = OffsetMode::kNone;
              else if (s == "half") c.grid.offset_mode = OffsetMode::kHalfCell;
              else if (s == "explicit") c.grid.offset_mode = OffsetMode::kExplicit;
              else bad_value(k, v, "none|half|explicit");
            }},
      HOC_DOUBLE("grid", "offset", grid.offset),
      Entry{"grid", "allow_ratio_adjust",
            [](const Config& c) { return std::string(c.grid.allow_ratio_adjust ? "true" : "false"); },
            [](Config& c, const std::string& k, const std::string& v) {
              c.grid.allow_ratio_adjust = to_bool(k, v);
            }},

      HOC_DOUBLE("time", "mesh_ratio", grid.mesh_ratio),
      HOC_DOUBLE("time", "mu", time.mu),
      Entry{"time", "rannacher", [](const Config& c) { return std::string(c.time.rannacher ? "true" : "false"); },
            [](Config& c, const std::string& k, const std::string& v) { c.time.rannacher = to_bool(k, v); }},
      Entry{"time", "rannacher_substeps",
            [](const Config& c) { return std::to_string(c.time.rannacher_substeps); },
            [](Config& c, const std::string& k, const std::string& v) {
              c.time.rannacher_substeps = to_int<int>(k, v);
            }},

      Entry{"study", "scheme",
            [](const Config& c) { return std::string(c.study.scheme == Scheme::kHoc ? "hoc" : "central"); },
            [](Config& c, const std::string& k, const std::string& v) {
              const auto s = trim(v);
              if (s == "hoc") c.study.scheme = Scheme::kHoc;
              else if (s == "central") c.study.scheme = Scheme::kCentral;
              else bad_value(k, v, "hoc|central");
            }},
      HOC_LIST("ladder", ladder),
      HOC_DOUBLE("study", "reference_h", study.reference_h),
      HOC_LIST("ratios", ratios),
      HOC_LIST("map_h", map_h),
      HOC_LIST("probe_S", probe_S),
      HOC_LIST("probe_sigma", probe_sigma),
      Entry{"study", "mc_paths", [](const Config& c) { return std::to_string(c.study.mc_paths); },
            [](Config& c, const std::string& k, const std::string& v) {
              c.study.mc_paths = to_int<std::int64_t>(k, v);
            }},
      Entry{"study", "mc_steps", [](const Config& c) { return std::to_string(c.study.mc_steps); },
            [](Config& c, const std::string& k, const std::string& v) { c.study.mc_steps = to_int<int>(k, v); }},
      Entry{"study", "seed", [](const Config& c) { return std::to_string(c.study.seed); },
            [](Config& c, const std::string& k, const std::string& v) {
              c.study.seed = to_int<std::uint64_t>(k, v);
            }},
      Entry{"study", "threads", [](const Config& c) { return std::to_string(c.study.threads); },
            [](Config& c, const std::string& k, const std::string& v) { c.study.threads = to_int<int>(k, v); }},
      Entry{"study", "samples", [](const Config& c) { return std::to_string(c.study.samples); },
            [](Config& c, const std::string& k, const std::string& v) {
              c.study.samples = to_int<std::int64_t>(k, v);
            }},
      Entry{"study", "refine_starts", [](const Config& c) { return std::to_string(c.study.refine_starts); },
            [](Config& c, const std::string& k, const std::string& v) {
              c.study.refine_starts = to_int<int>(k, v);
            }},
      HOC_LIST("rho_sweep", rho_sweep),
      HOC_DOUBLE("study", "vn_tolerance", study.vn_tolerance),
      HOC_INTERVAL("box_h", h),
      HOC_INTERVAL("box_k", k),
      HOC_INTERVAL("box_y", y),
      HOC_INTERVAL("box_v", v),
      HOC_INTERVAL("box_kappa", kappa),
      HOC_INTERVAL("box_theta", theta),
      HOC_INTERVAL("box_r", r),
      HOC_INTERVAL("box_mu", mu),
      HOC_INTERVAL("box_z1", z1),
      HOC_INTERVAL("box_z2", z2),
      HOC_DOUBLE("study", "beta0_scale", study.box.beta0_scale),
      Entry{"study", "out_dir", [](const Config& c) { return c.study.out_dir; },
            [](Config& c, const std::string&, const std::string& v) { c.study.out_dir = trim(v); }},
  };
  return table;
}

#undef HOC_DOUBLE
#undef HOC_INTERVAL
#undef HOC_LIST

void finalize(Config& c) {
  c.grid.maturity = c.model.T;
  // rho in the search box is driven by the sweep, not by the model.
  c.study.box.rho = {0.0, 0.0};
}

}  // namespace

bool StudyConfig::operator==(const StudyConfig& o) const {
  Config a, b;
  a.study = *this;
  b.study = o;
  return flatten(a) == flatten(b);
}

bool Config::operator==(const Config& o) const { return flatten(*this) == flatten(o); }

Config default_config() {
  Config c;
  finalize(c);
  return c;
}

void set_value(Config& cfg, const std::string& section, const std::string& key,
               const std::string& value) {
  for (const auto& e : entries()) {
    if (section == e.section && key == e.key) {
      e.set(cfg, section + "." + key, value);
      finalize(cfg);
      return;
    }
  }
  throw ConfigError("unknown config key '" + section + "." + key + "'");
}

void apply_override(Config& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq)
    throw ConfigError("override '" + assignment + "' must look like section.key=value");
  set_value(cfg, trim(assignment.substr(0, dot)), trim(assignment.substr(dot + 1, eq - dot - 1)),
            assignment.substr(eq + 1));
}

Config parse_config(std::istream& is) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax error: ") + e.what());
  }
  Config cfg = default_config();
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("config key '" + section + "' outside a section");
    for (const auto& [key, val] : body) set_value(cfg, section, key, val.data());
  }
  return cfg;
}

Config parse_config_string(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

Config load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

std::vector<std::pair<std::string, std::string>> flatten(const Config& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : entries()) out.emplace_back(std::string(e.section) + "." + e.key, e.get(cfg));
  return out;
}

std::string emit_config(const Config& cfg) {
  std::ostringstream os;
  std::string current;
  for (const auto& e : entries()) {
    if (current != e.section) {
      if (!current.empty()) os << '\n';
      current = e.section;
      os << '[' << current << "]\n";
    }
    os << e.key << " = " << e.get(cfg) << '\n';
  }
  return os.str();
}

void write_metadata(std::ostream& os, const Config& cfg) {
  for (const auto& [k, v] : flatten(cfg)) os << "# " << k << " = " << v << '\n';
}

Config parse_metadata(std::istream& is) {
  Config cfg = default_config();
  for (std::string line; is.peek() == '#' && std::getline(is, line);) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string name = trim(line.substr(1, eq - 1));
    const auto dot = name.find('.');
    if (dot == std::string::npos) continue;
    set_value(cfg, name.substr(0, dot), name.substr(dot + 1), line.substr(eq + 1));
  }
  return cfg;
}

}  // namespace hoc
