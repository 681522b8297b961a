#include "hoc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <ostream>
#include <thread>

#include "hoc/error.hpp"

namespace hoc {

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t nt = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (nt <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex err_mu;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < nt; ++w)
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(err_mu);
            if (!first) first = std::current_exception();
          }
        }
      });
  }
  if (first) std::rethrow_exception(first);
}

namespace {

// Index of the node of `g` at coordinate x (or y), if there is one.
std::optional<int> match_x(const Grid& g, double x) {
  const int i = static_cast<int>(std::lround((x - g.offset) / g.h1));
  if (i < -g.N || i > g.N || std::abs(g.x(i) - x) > 1e-12) return std::nullopt;
  return i;
}
std::optional<int> match_y(const Grid& g, double y) {
  const int j = static_cast<int>(std::lround((y - g.L2) / g.h2));
  if (j < 0 || j > g.M || std::abs(g.y(j) - y) > 1e-12) return std::nullopt;
  return j;
}

template <class Fn>
void for_common_nodes(const SolutionField& u, const SolutionField& ref, Fn&& fn) {
  const Grid& g = u.grid;
  std::vector<int> ri(static_cast<std::size_t>(g.nx()));
  for (int i = -g.N + 1; i < g.N; ++i) {
    const auto m = match_x(ref.grid, g.x(i));
    if (!m) throw DomainError("error_norms: non-nested grids (x-node has no partner)");
    ri[static_cast<std::size_t>(i + g.N)] = *m;
  }
  std::vector<int> rj(static_cast<std::size_t>(g.ny()));
  for (int j = 1; j < g.M; ++j) {
    const auto m = match_y(ref.grid, g.y(j));
    if (!m) throw DomainError("error_norms: non-nested grids (y-node has no partner)");
    rj[static_cast<std::size_t>(j)] = *m;
  }
  for (int i = -g.N + 1; i < g.N; ++i)
    for (int j = 1; j < g.M; ++j)
      fn(i, j, u.at(i, j) - ref.at(ri[static_cast<std::size_t>(i + g.N)], rj[static_cast<std::size_t>(j)]));
}

std::string cache_key(const ModelParams& p, const GridConfig& g, const TimeLoopConfig& l, Scheme s) {
  std::string k;
  for (double x : {p.r, p.v, p.kappa_star, p.theta_star, p.lambda0, p.rho, p.K, p.T, g.h,
                   g.x_half_width, g.y_min, g.y_max, g.mesh_ratio, g.maturity, g.offset, l.mu})
    k += format_double(x) + ';';
  k += std::to_string(static_cast<int>(g.offset_mode)) + ';' + (g.allow_ratio_adjust ? "a" : "-");
  k += std::string(l.rannacher ? "R" : "-") + std::to_string(l.rannacher_substeps);
  k += s == Scheme::kHoc ? "hoc" : "central";
  return k;
}

SolveResult run_one(const ModelParams& p, const GridConfig& gc, const TimeLoopConfig& loop,
                    Scheme scheme) {
  AssemblyOptions opts;
  opts.scheme = scheme;
  return solve_pde(p, build_grid(gc), loop, opts);
}

}  // namespace

ErrorNorms error_norms(const SolutionField& u, const SolutionField& ref) {
  ErrorNorms n;
  double sum = 0.0;
  for_common_nodes(u, ref, [&](int, int, double e) {
    sum += e * e;
    n.eps_inf = std::max(n.eps_inf, std::abs(e));
    ++n.nodes;
  });
  n.eps2 = std::sqrt(u.grid.h() * u.grid.h() * sum);
  return n;
}

std::vector<double> error_field(const SolutionField& u, const SolutionField& ref) {
  std::vector<double> e(u.grid.size(), 0.0);
  for_common_nodes(u, ref, [&](int i, int j, double d) { e[u.grid.flat(i, j)] = d; });
  return e;
}

SlopeFit fit_slope(const std::vector<std::pair<double, double>>& records) {
  SlopeFit f;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [h, e] : records) {
    if (!(h > 0.0)) throw DomainError("fit_slope: h must be positive");
    if (!(e > 0.0) || !std::isfinite(e)) {
      ++f.excluded;
      continue;
    }
    const double x = std::log(h), y = std::log(e);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++f.used;
  }
  if (f.used < 3) throw DomainError("fit_slope: fewer than three usable records");
  const double n = static_cast<double>(f.used);
  const double den = n * sxx - sx * sx;
  if (!(std::abs(den) > 0.0)) throw DomainError("fit_slope: degenerate h values");
  f.m = (n * sxy - sx * sy) / den;
  f.C = std::exp((sy - f.m * sx) / n);
  return f;
}

std::shared_ptr<const SolveResult> SolveCache::get(const ModelParams& p, const GridConfig& g,
                                                   const TimeLoopConfig& loop, Scheme scheme) {
  const std::string key = cache_key(p, g, loop, scheme);
  {
    std::lock_guard lock(mu_);
    if (auto it = runs_.find(key); it != runs_.end()) return it->second;
  }
  // Solved outside the lock; two threads racing on one key both compute it.
  auto res = std::make_shared<const SolveResult>(run_one(p, g, loop, scheme));
  std::lock_guard lock(mu_);
  return runs_.emplace(key, std::move(res)).first->second;
}

GridConfig level_grid(const GridConfig& base, double h) {
  GridConfig g = base;
  g.h = h;
  if (base.offset_mode == OffsetMode::kHalfCell) {
    g.offset_mode = OffsetMode::kExplicit;
    g.offset = h / 2;
  }
  return g;
}

ConvergenceReport run_convergence(const Config& cfg, SolveCache* cache) {
  const auto& ladder = cfg.study.ladder;
  for (std::size_t i = 1; i < ladder.size(); ++i)
    if (!(ladder[i] < ladder[i - 1])) throw ConfigError("ladder must be strictly decreasing");
  if (ladder.empty() || !(cfg.study.reference_h < ladder.back()))
    throw ConfigError("reference_h must be finer than the finest ladder level");

  SolveCache local;
  SolveCache& runs = cache ? *cache : local;
  std::vector<std::optional<ConvergenceRecord>> out(ladder.size());
  std::vector<std::string> errors(ladder.size());

  parallel_for(ladder.size(), cfg.study.threads, [&](std::size_t l) {
    try {
      const GridConfig g = level_grid(cfg.grid, ladder[l]);
      GridConfig gr = g;
      gr.h = cfg.study.reference_h;
      // The reference always uses the compact scheme.
      const auto ref = runs.get(cfg.model, gr, cfg.time, Scheme::kHoc);
      const auto run = runs.get(cfg.model, g, cfg.time, cfg.study.scheme);
      const auto n = error_norms(run->field, ref->field);
      out[l] = ConvergenceRecord{ladder[l], run->field.grid.k, n.eps2, n.eps_inf, n.nodes};
    } catch (const Error& e) {
      errors[l] = e.what();
    }
  });

  ConvergenceReport rep;
  for (std::size_t l = 0; l < ladder.size(); ++l) {
    if (out[l]) rep.records.push_back(*out[l]);
    if (!errors[l].empty() && rep.error.empty())
      rep.error = "h=" + format_double(ladder[l]) + ": " + errors[l];
  }
  if (rep.error.empty()) {
    std::vector<std::pair<double, double>> e2, ei;
    for (const auto& r : rep.records) {
      e2.emplace_back(r.h, r.eps2);
      ei.emplace_back(r.h, r.eps_inf);
    }
    try {
      rep.slope2 = fit_slope(e2);
      rep.slope_inf = fit_slope(ei);
    } catch (const DomainError& e) {
      rep.error = e.what();
    }
  }
  return rep;
}

void write_convergence_csv(std::ostream& os, const ConvergenceReport& rep, const Config& cfg) {
  write_metadata(os, cfg);
  os << "# error_region = interior nodes of each level shared with its reference\n";
  if (!rep.error.empty()) os << "# aborted = " << rep.error << '\n';
  os << "h,k,eps2,epsInf\n";
  for (const auto& r : rep.records)
    os << format_double(r.h) << ',' << format_double(r.k) << ',' << format_double(r.eps2) << ','
       << format_double(r.eps_inf) << '\n';
}

void write_slope_txt(std::ostream& os, const ConvergenceReport& rep) {
  os << "norm,m,C\n";
  os << "eps2," << format_double(rep.slope2.m) << ',' << format_double(rep.slope2.C) << '\n';
  os << "epsInf," << format_double(rep.slope_inf.m) << ',' << format_double(rep.slope_inf.C) << '\n';
}

const char* to_string(CellFlag f) {
  switch (f) {
    case CellFlag::kOk: return "ok";
    case CellFlag::kNonFinite: return "nonfinite";
    case CellFlag::kOscillation: return "oscillation";
    case CellFlag::kSolverFailure: return "solver_failure";
  }
  return "?";
}

namespace {

// Entries below 1e-3 of the largest |e| carry no sign information (far
// field next to the Dirichlet sides) and are skipped.
int max_row_sign_changes(const Grid& g, const std::vector<double>& e) {
  double emax = 0.0;
  for (double v : e) emax = std::max(emax, std::abs(v));
  const double floor = 1e-3 * emax;
  int best = 0;
  for (int j = 1; j < g.M; ++j) {
    int count = 0;
    double prev = 0.0;
    for (int i = -g.N + 1; i < g.N; ++i) {
      const double v = e[g.flat(i, j)];
      if (std::abs(v) <= floor) continue;
      if (prev != 0.0 && (v > 0) != (prev > 0)) ++count;
      prev = v;
    }
    best = std::max(best, count);
  }
  return best;
}

}  // namespace

StabilityMap run_stability_map(const Config& cfg, SolveCache* cache) {
  StabilityMap map;
  map.ratios = cfg.study.ratios;
  map.hs = cfg.study.map_h;
  for (double h : map.hs)
    if (!(cfg.study.reference_h < h)) throw ConfigError("reference_h must be finer than every map h");

  SolveCache local;
  SolveCache& runs = cache ? *cache : local;
  const std::size_t nh = map.hs.size();
  map.cells.resize(map.ratios.size() * nh);

  parallel_for(map.cells.size(), cfg.study.threads, [&](std::size_t c) {
    MapCell& cell = map.cells[c];
    cell.ratio = map.ratios[c / nh];
    cell.h = map.hs[c % nh];
    try {
      GridConfig g = level_grid(cfg.grid, cell.h);
      g.mesh_ratio = cell.ratio;
      g.allow_ratio_adjust = true;
      GridConfig gr = level_grid(cfg.grid, cell.h);
      gr.h = cfg.study.reference_h;
      const auto ref = runs.get(cfg.model, gr, cfg.time, Scheme::kHoc);
      const auto run = runs.get(cfg.model, g, cfg.time, cfg.study.scheme);
      cell.actual_ratio = run->field.grid.mesh_ratio();
      const auto n = error_norms(run->field, ref->field);
      cell.eps2 = n.eps2;
      if (!std::isfinite(n.eps2)) {
        cell.flag = CellFlag::kNonFinite;
      } else {
        cell.sign_changes = max_row_sign_changes(run->field.grid, error_field(run->field, ref->field));
      }
    } catch (const NumericalError&) {
      cell.flag = CellFlag::kSolverFailure;
      cell.eps2 = std::numeric_limits<double>::quiet_NaN();
    }
  });

  // Oscillation: more than twice the sign changes of the run with the
  // smallest time step at the same h.
  std::size_t finest = 0;
  for (std::size_t r = 1; r < map.ratios.size(); ++r)
    if (map.ratios[r] < map.ratios[finest]) finest = r;
  for (std::size_t i = 0; i < nh; ++i) {
    const int base = std::max(1, map.cells[finest * nh + i].sign_changes);
    for (std::size_t r = 0; r < map.ratios.size(); ++r) {
      MapCell& cell = map.cells[r * nh + i];
      if (cell.flag == CellFlag::kOk && cell.sign_changes > 2 * base) cell.flag = CellFlag::kOscillation;
    }
  }
  for (std::size_t i = 0; i < nh; ++i) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t r = 0; r < map.ratios.size(); ++r) {
      const double e = map.cells[r * nh + i].eps2;
      if (!std::isfinite(e)) continue;
      lo = std::min(lo, e);
      hi = std::max(hi, e);
    }
    map.spread.push_back(lo > 0.0 && std::isfinite(lo) ? hi / lo : std::numeric_limits<double>::infinity());
  }
  return map;
}

void write_stability_map_csv(std::ostream& os, const StabilityMap& map, const Config& cfg) {
  write_metadata(os, cfg);
  os << "ratio,h,eps2,flag,actual_ratio,sign_changes\n";
  for (const auto& c : map.cells)
    os << format_double(c.ratio) << ',' << format_double(c.h) << ',' << format_double(c.eps2) << ','
       << to_string(c.flag) << ',' << format_double(c.actual_ratio) << ',' << c.sign_changes << '\n';
}

}  // namespace hoc
