#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace hoc {

/// How the x-grid is shifted relative to x = 0 (the payoff kink).
enum class OffsetMode {
  kNone,      // x_i = i h, the kink sits on a node
  kHalfCell,  // x_i = i h + h/2
  kExplicit,  // x_i = i h + delta with a user supplied delta
};

struct GridConfig {
  double h = 0.1;             // mesh width in x and y
  double x_half_width = 2.0;  // R1 = N h
  double y_min = 0.5;         // L2, in y = sigma / v units
  double y_max = 10.1;        // R2 = L2 + M h
  double mesh_ratio = 0.78125;  // k / h^2
  double maturity = 0.5;        // T
  OffsetMode offset_mode = OffsetMode::kHalfCell;
  double offset = 0.0;          // used with OffsetMode::kExplicit
  /// When false, T / (ratio h^2) must be an integer; when true the step is
  /// shrunk to T / ceil(T / (ratio h^2)).
  bool allow_ratio_adjust = false;

  bool operator==(const GridConfig&) const = default;
};

enum class NodeTag {
  kInterior,
  kDirichletLeft,
  kDirichletRight,
  kNeumannBottom,
  kNeumannTop,
};

/// Uniform tensor grid: x_i = i h + delta (i = -N..N), y_j = L2 + j h
/// (j = 0..M). Flat index is (i + N)(M + 1) + j, so j runs fastest.
class Grid {
 public:
  int N = 0;
  int M = 0;
  double h1 = 0.0;
  double h2 = 0.0;
  double k = 0.0;
  double R1 = 0.0;
  double L2 = 0.0;
  double R2 = 0.0;
  double offset = 0.0;
  int n_steps = 0;
  double maturity = 0.0;

  double h() const { return h1; }
  double mesh_ratio() const { return k / (h1 * h1); }

  int nx() const { return 2 * N + 1; }
  int ny() const { return M + 1; }
  std::size_t size() const {
    return static_cast<std::size_t>(nx()) * static_cast<std::size_t>(ny());
  }

  double x(int i) const { return i * h1 + offset; }
  double y(int j) const { return L2 + j * h2; }
  double t(int n) const { return n * k; }

  std::size_t flat(int i, int j) const {
    return static_cast<std::size_t>(i + N) * static_cast<std::size_t>(M + 1) +
           static_cast<std::size_t>(j);
  }
  /// Inverse of flat(): returns (i, j).
  std::pair<int, int> unflat(std::size_t idx) const {
    const int row = static_cast<int>(idx / static_cast<std::size_t>(M + 1));
    return {row - N, static_cast<int>(idx % static_cast<std::size_t>(M + 1))};
  }
  bool contains(int i, int j) const { return i >= -N && i <= N && j >= 0 && j <= M; }

  /// Interior nodes exclude both x-boundaries and both y-boundaries.
  bool interior(int i, int j) const { return i > -N && i < N && j > 0 && j < M; }

  std::vector<double> x_nodes() const;
  std::vector<double> y_nodes() const;
};

Grid build_grid(const GridConfig& cfg);

/// Per-node tag in flat order. Corners on the x-boundaries are Dirichlet.
std::vector<NodeTag> classify(const Grid& grid);
NodeTag classify_node(const Grid& grid, int i, int j);

/// Fourth-order zero-slope extrapolation (18 u1 - 9 u2 + 2 u3) / 11, where
/// u1 is the node next to the boundary.
inline double neumann_extrapolate(double u1, double u2, double u3) {
  return (18.0 * u1 - 9.0 * u2 + 2.0 * u3) / 11.0;
}

/// Boundary values (bottom, top) for one x-column slice of length M + 1.
/// Throws DomainError when the slice has fewer than four entries.
std::pair<double, double> neumann_extrapolate(std::span<const double> column);

}  // namespace hoc
