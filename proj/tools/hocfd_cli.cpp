// hocfd: command-line front end.
//
//   hocfd [--config FILE] [--set section.key=value ...] [--out DIR]
//         [--seed N] [--threads N] <command>
//
// Exit codes: 0 success, 2 configuration/input error, 3 numerical failure
// (including a failed vn-check or an aborted study).

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hoc/analytic.hpp"
#include "hoc/config.hpp"
#include "hoc/error.hpp"
#include "hoc/harness.hpp"
#include "hoc/solver.hpp"
#include "hoc/stability.hpp"
#include "hoc/stencil.hpp"

namespace {

using namespace hoc;

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericalFailure = 3;

std::ofstream open_output(const Config& cfg, const std::string& name, const std::string& command) {
  std::filesystem::create_directories(cfg.study.out_dir);
  const auto path = std::filesystem::path(cfg.study.out_dir) / name;
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << "# command = " << command << '\n';
  return os;
}

int cmd_price(const Config& cfg) {
  const Grid grid = build_grid(cfg.grid);
  AssemblyOptions opts;
  opts.scheme = cfg.study.scheme;
  const auto res = solve_pde(cfg.model, grid, cfg.time, opts);
  {
    auto os = open_output(cfg, "surface.csv", "price");
    std::map<std::string, std::string> meta;
    for (const auto& [k, v] : flatten(cfg)) meta[k] = v;
    write_surface_csv(os, res.field, cfg.model, meta);
  }
  if (res.range_warning) std::cerr << "warning: solution leaves [-0.01, 1.01] somewhere on the grid\n";
  std::ostringstream report;
  report << "S,sigma,V\n" << std::setprecision(10);
  for (double S : cfg.study.probe_S)
    for (double s : cfg.study.probe_sigma)
      report << S << ',' << s << ',' << probe_price(res.field, cfg.model, S, s) << '\n';
  std::cout << report.str();
  return kOk;
}

int cmd_converge(const Config& cfg) {
  const auto rep = run_convergence(cfg);
  {
    auto os = open_output(cfg, "convergence.csv", "converge");
    write_convergence_csv(os, rep, cfg);
  }
  if (!rep.error.empty()) {
    std::cerr << "convergence study aborted: " << rep.error << '\n';
    return kNumericalFailure;
  }
  {
    auto os = open_output(cfg, "slope.txt", "converge");
    write_slope_txt(os, rep);
  }
  std::cout << "h,k,eps2,epsInf\n";
  for (const auto& r : rep.records)
    std::cout << r.h << ',' << r.k << ',' << r.eps2 << ',' << r.eps_inf << '\n';
  std::cout << "slope eps2 m=" << rep.slope2.m << " C=" << rep.slope2.C << '\n'
            << "slope epsInf m=" << rep.slope_inf.m << " C=" << rep.slope_inf.C << '\n';
  return kOk;
}

int cmd_stability_map(const Config& cfg) {
  const auto map = run_stability_map(cfg);
  {
    auto os = open_output(cfg, "stability_map.csv", "stability-map");
    write_stability_map_csv(os, map, cfg);
  }
  bool clean = true;
  for (const auto& c : map.cells) clean = clean && c.flag == CellFlag::kOk;
  std::cout << "h,max_over_min_eps2\n";
  for (std::size_t i = 0; i < map.hs.size(); ++i) std::cout << map.hs[i] << ',' << map.spread[i] << '\n';
  std::cout << (clean ? "all cells ok\n" : "some cells flagged (see stability_map.csv)\n");
  return kOk;
}

int cmd_vn_check(const Config& cfg) {
  SearchOptions opt;
  opt.samples = cfg.study.samples;
  opt.seed = cfg.study.seed;
  opt.threads = cfg.study.threads;
  opt.refine_starts = cfg.study.refine_starts;

  auto os = open_output(cfg, "vn_check.csv", "vn-check");
  write_metadata(os, cfg);
  write_search_csv_header(os);
  bool pass = true;
  std::cout << std::setprecision(6);
  // rho = 0 is the proven case and gets the tight tolerance.
  std::vector<double> rhos{0.0};
  for (double r : cfg.study.rho_sweep)
    if (r != 0.0) rhos.push_back(r);
  for (double rho : rhos) {
    SearchBox box = cfg.study.box;
    box.rho = {rho, rho};
    const auto res = stability_search(box, opt);
    write_search_csv_row(os, res);
    const double tol = rho == 0.0 ? 1e-12 : cfg.study.vn_tolerance;
    const bool ok = res.max_value <= tol;
    pass = pass && ok;
    std::cout << "rho=" << rho << " max(|G|^2-1)=" << res.max_value << " at y=" << res.argmax.y
              << " h=" << res.argmax.h << " k=" << res.argmax.k << " -> " << (ok ? "PASS" : "FAIL")
              << '\n';
  }
  return pass ? kOk : kNumericalFailure;
}

int cmd_analytic(const Config& cfg) {
  auto os = open_output(cfg, "analytic.csv", "analytic");
  write_metadata(os, cfg);
  os << "S,sigma,V\n" << std::setprecision(12);
  std::cout << "S,sigma,V\n" << std::setprecision(10);
  for (double S : cfg.study.probe_S)
    for (double s : cfg.study.probe_sigma) {
      const double v = heston_put(cfg.model, S, s, 0.0);
      os << S << ',' << s << ',' << v << '\n';
      std::cout << S << ',' << s << ',' << v << '\n';
    }
  return kOk;
}

int cmd_mc(const Config& cfg) {
  McConfig mc;
  mc.n_paths = cfg.study.mc_paths;
  mc.n_steps = cfg.study.mc_steps;
  mc.seed = cfg.study.seed;
  mc.threads = cfg.study.threads;
  auto os = open_output(cfg, "mc.csv", "mc");
  write_metadata(os, cfg);
  os << "S,sigma,V,std_error,paths\n" << std::setprecision(12);
  std::cout << "S,sigma,V,std_error\n" << std::setprecision(8);
  for (double S : cfg.study.probe_S)
    for (double s : cfg.study.probe_sigma) {
      const auto r = mc_put(cfg.model, S, s, 0.0, mc);
      os << S << ',' << s << ',' << r.price << ',' << r.std_error << ',' << r.paths << '\n';
      std::cout << S << ',' << s << ',' << r.price << ',' << r.std_error << '\n';
    }
  return kOk;
}

int cmd_dump_weights(const Config& cfg) {
  const Grid grid = build_grid(cfg.grid);
  auto os = open_output(cfg, "weights.csv", "dump-weights");
  write_metadata(os, cfg);
  dump_weights_csv(os, grid, PdeCoefficients::from(cfg.model), cfg.time.mu);
  std::cout << "wrote " << (std::filesystem::path(cfg.study.out_dir) / "weights.csv").string() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"High-order compact finite differences for the Heston put"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  std::uint64_t seed = 0;
  int threads = 0;
  app.add_option("--config", config_path, "INI file with [model], [grid], [time], [study]");
  app.add_option("--set", overrides, "Override one key, section.key=value (repeatable)");
  auto* out_opt = app.add_option("--out", out_dir, "Output directory (study.out_dir)");
  auto* seed_opt = app.add_option("--seed", seed, "Random seed (study.seed)");
  auto* threads_opt =
      app.add_option("--threads", threads, "Worker threads (study.threads)")->check(CLI::PositiveNumber);

  const std::vector<std::pair<std::string, std::string>> commands{
      {"price", "Solve the PDE, write surface.csv and print V at the probes"},
      {"converge", "Grid-refinement study; writes convergence.csv and slope.txt"},
      {"stability-map", "Error over (k/h^2, h); writes stability_map.csv"},
      {"vn-check", "Search max |G|^2-1 for rho = 0 and the rho sweep"},
      {"analytic", "Semi-closed-form Heston put at the probes"},
      {"mc", "Monte Carlo put at the probes"},
      {"dump-weights", "Write the per-row stencil weights to weights.csv"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    Config cfg = config_path.empty() ? default_config() : load_config_file(config_path);
    for (const auto& o : overrides) apply_override(cfg, o);
    if (*out_opt) set_value(cfg, "study", "out_dir", out_dir);
    if (*seed_opt) set_value(cfg, "study", "seed", std::to_string(seed));
    if (*threads_opt) set_value(cfg, "study", "threads", std::to_string(threads));
    cfg.model.validate();

    if (command == "price") return cmd_price(cfg);
    if (command == "converge") return cmd_converge(cfg);
    if (command == "stability-map") return cmd_stability_map(cfg);
    if (command == "vn-check") return cmd_vn_check(cfg);
    if (command == "analytic") return cmd_analytic(cfg);
    if (command == "mc") return cmd_mc(cfg);
    return cmd_dump_weights(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DomainError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericalFailure;
  }
}
