#include "hoc/grid.hpp"

#include <cmath>
#include <sstream>

#include "hoc/error.hpp"

namespace hoc {

namespace {

// Rounds value to the nearest integer and throws unless it is one to within
// a relative 1e-9.
int exact_count(double value, const char* what) {
  const double rounded = std::round(value);
  if (!(std::abs(value - rounded) <= 1e-9 * std::max(1.0, std::abs(value)))) {
    std::ostringstream os;
    os << "grid: " << what << " = " << value << " is not an integer multiple of h";
    throw ConfigError(os.str());
  }
  return static_cast<int>(rounded);
}

}  // namespace

std::vector<double> Grid::x_nodes() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(nx()));
  for (int i = -N; i <= N; ++i) out.push_back(x(i));
  return out;
}

std::vector<double> Grid::y_nodes() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(ny()));
  for (int j = 0; j <= M; ++j) out.push_back(y(j));
  return out;
}

Grid build_grid(const GridConfig& cfg) {
  if (!(cfg.h > 0.0)) throw ConfigError("grid: h must be > 0");
  if (!(cfg.y_min > 0.0)) throw ConfigError("grid: y_min (L2) must be > 0");
  if (!(cfg.y_max > cfg.y_min)) throw ConfigError("grid: y_max must exceed y_min");
  if (!(cfg.x_half_width > 0.0)) throw ConfigError("grid: x_half_width must be > 0");
  if (!(cfg.mesh_ratio > 0.0)) throw ConfigError("grid: mesh_ratio must be > 0");
  if (cfg.maturity < 0.0) throw ConfigError("grid: maturity must be >= 0");

  Grid g;
  g.h1 = g.h2 = cfg.h;
  g.N = exact_count(cfg.x_half_width / cfg.h, "x_half_width / h");
  g.M = exact_count((cfg.y_max - cfg.y_min) / cfg.h, "(y_max - y_min) / h");
  if (g.N < 2) throw ConfigError("grid: N must be >= 2");
  if (g.M < 3) throw ConfigError("grid: M must be >= 3");
  g.R1 = g.N * cfg.h;
  g.L2 = cfg.y_min;
  g.R2 = g.L2 + g.M * cfg.h;

  switch (cfg.offset_mode) {
    case OffsetMode::kNone: g.offset = 0.0; break;
    case OffsetMode::kHalfCell: g.offset = 0.5 * cfg.h; break;
    case OffsetMode::kExplicit: g.offset = cfg.offset; break;
  }

  g.maturity = cfg.maturity;
  const double k_nominal = cfg.mesh_ratio * cfg.h * cfg.h;
  if (cfg.maturity == 0.0) {
    g.n_steps = 0;
    g.k = k_nominal;
  } else if (cfg.allow_ratio_adjust) {
    g.n_steps = static_cast<int>(std::ceil(cfg.maturity / k_nominal - 1e-9));
    g.n_steps = std::max(g.n_steps, 1);
    g.k = cfg.maturity / g.n_steps;
  } else {
    g.n_steps = exact_count(cfg.maturity / k_nominal, "T / (mesh_ratio h^2)");
    g.k = k_nominal;
  }
  return g;
}

NodeTag classify_node(const Grid& grid, int i, int j) {
  if (i == -grid.N) return NodeTag::kDirichletLeft;
  if (i == grid.N) return NodeTag::kDirichletRight;
  if (j == 0) return NodeTag::kNeumannBottom;
  if (j == grid.M) return NodeTag::kNeumannTop;
  return NodeTag::kInterior;
}

std::vector<NodeTag> classify(const Grid& grid) {
  std::vector<NodeTag> tags(grid.size());
  for (int i = -grid.N; i <= grid.N; ++i) {
    for (int j = 0; j <= grid.M; ++j) tags[grid.flat(i, j)] = classify_node(grid, i, j);
  }
  return tags;
}

std::pair<double, double> neumann_extrapolate(std::span<const double> column) {
  if (column.size() < 4) {
    throw DomainError("neumann_extrapolate: slice needs at least 4 entries (M >= 3)");
  }
  const std::size_t m = column.size() - 1;
  return {neumann_extrapolate(column[1], column[2], column[3]),
          neumann_extrapolate(column[m - 1], column[m - 2], column[m - 3])};
}

}  // namespace hoc
