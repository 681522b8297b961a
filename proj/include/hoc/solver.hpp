#pragma once

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <Eigen/IterativeLinearSolvers>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hoc/grid.hpp"
#include "hoc/model.hpp"
#include "hoc/stencil.hpp"

namespace hoc {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// u^n on every grid node (flat order of Grid) at t_tilde = time_level * k.
struct SolutionField {
  Grid grid;
  std::vector<double> values;
  int time_level = 0;
  double t = 0.0;

  double at(int i, int j) const { return values[grid.flat(i, j)]; }
};

enum class BoundaryMode {
  kPhysical,    // Dirichlet in x, extrapolation rows in y
  kAllNeumann,  // extrapolation rows on all four sides (test configuration)
};

struct AssemblyOptions {
  Scheme scheme = Scheme::kHoc;
  BoundaryMode boundary = BoundaryMode::kPhysical;
  /// Swap the roles of the two weight sets on interior rows; with mu = 1/2
  /// this is the time-reversed Crank-Nicolson step.
  bool reverse = false;
};

/// lhs u^{n+1} = rhs u^n + (Dirichlet data injected on constraint rows).
struct SystemPair {
  SparseMatrix lhs;
  SparseMatrix rhs;
  std::vector<std::size_t> dirichlet_left;
  std::vector<std::size_t> dirichlet_right;
  double k = 0.0;
  double mu = 0.0;
};

SystemPair assemble(const Grid& grid, const ModelParams& params, double k, double mu,
                    const AssemblyOptions& opts = {});

/// Direct sparse LU below `iterative_threshold` unknowns, BiCGSTAB with an
/// incomplete LU preconditioner above it. Every solve is checked against the
/// relative residual tolerance.
class LinearSolver {
 public:
  static constexpr std::size_t kDefaultIterativeThreshold = 400'000;
  static constexpr double kResidualTolerance = 1e-10;

  explicit LinearSolver(const SparseMatrix& a,
                        std::size_t iterative_threshold = kDefaultIterativeThreshold);

  /// Throws NumericalError (with the residual) when the contract is missed.
  Eigen::VectorXd solve(const Eigen::VectorXd& b);

  bool iterative() const { return iterative_; }
  double last_residual() const { return last_residual_; }

 private:
  const SparseMatrix& a_;
  bool iterative_ = false;
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu_;
  Eigen::BiCGSTAB<SparseMatrix, Eigen::IncompleteLUT<double>> krylov_;
  double last_residual_ = 0.0;
};

/// One time step from u^n (time t_n) to u^{n+1} at t_next. Returns the
/// relative linear residual.
double step(const SystemPair& sys, LinearSolver& solver, const Grid& grid,
            const ModelParams& params, std::span<const double> un, double t_next,
            std::vector<double>& out);

struct TimeLoopConfig {
  double mu = 0.5;
  bool rannacher = true;
  int rannacher_substeps = 4;
};

struct StepRecord {
  int step = 0;
  double t = 0.0;
  double residual = 0.0;
};

struct SolveResult {
  SolutionField field;
  std::vector<StepRecord> log;
  double max_residual = 0.0;
  /// Set when the final field leaves [-0.01, 1.01]; HOC schemes are not
  /// monotone, so this is a warning, not an error.
  bool range_warning = false;
};

/// Payoff sampled on the grid (Dirichlet nodes at t = 0 included).
SolutionField initial_field(const Grid& grid);

SolveResult solve_pde(const ModelParams& params, const Grid& grid, const TimeLoopConfig& loop,
                      const AssemblyOptions& opts = {});

/// Same, starting from a caller-supplied field at t = 0.
SolveResult solve_pde(const ModelParams& params, const Grid& grid, const TimeLoopConfig& loop,
                      const AssemblyOptions& opts, std::vector<double> initial);

/// Bilinear read-off of the price V at (S, sigma). Throws DomainError when
/// the probe lies outside the grid.
double probe_price(const SolutionField& field, const ModelParams& params, double S,
                   double sigma);

/// CSV export (i,j,x,y,sigma,S,u,V) preceded by "# key = value" metadata lines.
void write_surface_csv(std::ostream& os, const SolutionField& field, const ModelParams& params,
                       const std::map<std::string, std::string>& metadata);

}  // namespace hoc
