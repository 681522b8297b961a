#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "hoc/config.hpp"
#include "hoc/solver.hpp"

namespace hoc {

struct ErrorNorms {
  double eps2 = 0.0;    // sqrt(h^2 sum e^2) over common interior nodes
  double eps_inf = 0.0;
  std::size_t nodes = 0;
};

/// Errors of `u` against `ref` on the interior nodes of `u`. Every such node
/// must coincide with a node of `ref` (coordinates within 1e-12); otherwise
/// DomainError("non-nested grids").
ErrorNorms error_norms(const SolutionField& u, const SolutionField& ref);

/// Signed error u - ref on the interior nodes of u, flat order of u.grid
/// (boundary entries are zero).
std::vector<double> error_field(const SolutionField& u, const SolutionField& ref);

struct SlopeFit {
  double m = 0.0;
  double C = 0.0;
  std::size_t used = 0;
  std::size_t excluded = 0;  // zero-error records dropped
};

/// Least squares of ln(eps) = ln C + m ln h. Needs three positive records.
SlopeFit fit_slope(const std::vector<std::pair<double, double>>& records);

/// Runs keyed by their full configuration, shared between studies so that
/// a reference solution is computed once.
class SolveCache {
 public:
  std::shared_ptr<const SolveResult> get(const ModelParams& p, const GridConfig& g,
                                         const TimeLoopConfig& loop, Scheme scheme);

 private:
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<const SolveResult>> runs_;
};

struct ConvergenceRecord {
  double h = 0.0;
  double k = 0.0;
  double eps2 = 0.0;
  double eps_inf = 0.0;
  std::size_t nodes = 0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRecord> records;
  SlopeFit slope2;
  SlopeFit slope_inf;
  std::string error;  // non-empty when the study aborted; records are partial
};

/// Ladder study at fixed k/h^2. Each level is compared with a run at
/// reference_h that shares the level's x-offset, so the level's nodes are
/// nodes of its reference (with the half-cell rule the offset changes from
/// level to level).
ConvergenceReport run_convergence(const Config& cfg, SolveCache* cache = nullptr);

void write_convergence_csv(std::ostream& os, const ConvergenceReport& rep, const Config& cfg);
void write_slope_txt(std::ostream& os, const ConvergenceReport& rep);

enum class CellFlag { kOk, kNonFinite, kOscillation, kSolverFailure };
const char* to_string(CellFlag f);

struct MapCell {
  double ratio = 0.0;         // requested k/h^2
  double actual_ratio = 0.0;  // after rounding T/k up to an integer
  double h = 0.0;
  double eps2 = 0.0;
  int sign_changes = 0;       // max over interior rows of sign changes of e along x
  CellFlag flag = CellFlag::kOk;
};

struct StabilityMap {
  std::vector<double> ratios;
  std::vector<double> hs;
  std::vector<MapCell> cells;  // ratio-major
  /// max / min eps2 across ratios, per h (same order as hs).
  std::vector<double> spread;

  const MapCell& at(std::size_t ratio_index, std::size_t h_index) const {
    return cells[ratio_index * hs.size() + h_index];
  }
};

/// Every (ratio, h) cell is a full solve compared with the reference at
/// study.reference_h and the configured mesh ratio. Failures become flagged
/// cells; a cell oscillates when its error changes sign along x more than
/// twice as often as the smallest-ratio cell at the same h.
StabilityMap run_stability_map(const Config& cfg, SolveCache* cache = nullptr);

void write_stability_map_csv(std::ostream& os, const StabilityMap& map, const Config& cfg);

/// Calls fn(i) for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

/// Grid config for a level of a study: the configured one with h replaced
/// and, for the half-cell rule, the offset made explicit so a reference run
/// can share it.
GridConfig level_grid(const GridConfig& base, double h);

}  // namespace hoc
