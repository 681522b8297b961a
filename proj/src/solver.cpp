#include "hoc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "hoc/error.hpp"

namespace hoc {

namespace {

using Triplet = Eigen::Triplet<double>;

// Extrapolation row u_b - (18 u_1 - 9 u_2 + 2 u_3)/11 = 0, with nodes
// stepping inward from the boundary node `b`.
void add_extrapolation_row(std::vector<Triplet>& t, std::size_t row, std::size_t n1,
                           std::size_t n2, std::size_t n3) {
  t.emplace_back(row, row, 1.0);
  t.emplace_back(row, n1, -18.0 / 11.0);
  t.emplace_back(row, n2, 9.0 / 11.0);
  t.emplace_back(row, n3, -2.0 / 11.0);
}

}  // namespace

SystemPair assemble(const Grid& grid, const ModelParams& params, double k, double mu,
                    const AssemblyOptions& opts) {
  if (grid.M < 3) throw ConfigError("assemble: M must be >= 3");
  if (grid.N < 2) throw ConfigError("assemble: N must be >= 2");
  if (opts.boundary == BoundaryMode::kAllNeumann && grid.N < 2) {
    throw ConfigError("assemble: all-Neumann mode needs 2N + 1 >= 4");
  }
  if (!(grid.L2 > 0.0)) throw DomainError("assemble: y_min must be > 0");

  const auto coeffs = PdeCoefficients::from(params);
  const WeightCache cache(grid, coeffs, k, mu, opts.scheme);
  const auto n = static_cast<Eigen::Index>(grid.size());

  std::vector<Triplet> lt, rt;
  lt.reserve(grid.size() * 9);
  rt.reserve(grid.size() * 9);

  SystemPair sys;
  sys.k = k;
  sys.mu = mu;

  for (int i = -grid.N; i <= grid.N; ++i) {
    for (int j = 0; j <= grid.M; ++j) {
      const std::size_t row = grid.flat(i, j);
      const bool x_edge = i == -grid.N || i == grid.N;
      if (x_edge && opts.boundary == BoundaryMode::kPhysical) {
        lt.emplace_back(row, row, 1.0);
        (i == -grid.N ? sys.dirichlet_left : sys.dirichlet_right).push_back(row);
        continue;
      }
      if (x_edge) {
        const int s = i == -grid.N ? 1 : -1;
        add_extrapolation_row(lt, row, grid.flat(i + s, j), grid.flat(i + 2 * s, j),
                              grid.flat(i + 3 * s, j));
        continue;
      }
      if (j == 0) {
        add_extrapolation_row(lt, row, grid.flat(i, 1), grid.flat(i, 2), grid.flat(i, 3));
        continue;
      }
      if (j == grid.M) {
        add_extrapolation_row(lt, row, grid.flat(i, grid.M - 1), grid.flat(i, grid.M - 2),
                              grid.flat(i, grid.M - 3));
        continue;
      }
      const auto& w = cache.at(j);
      const auto& new_level = opts.reverse ? w.zeta : w.beta;
      const auto& old_level = opts.reverse ? w.beta : w.zeta;
      for (std::size_t l = 0; l < 9; ++l) {
        const auto [di, dj] = kStencilOffsets[l];
        const std::size_t col = grid.flat(i + di, j + dj);
        lt.emplace_back(row, col, new_level[l]);
        rt.emplace_back(row, col, old_level[l]);
      }
    }
  }

  sys.lhs.resize(n, n);
  sys.rhs.resize(n, n);
  sys.lhs.setFromTriplets(lt.begin(), lt.end());
  sys.rhs.setFromTriplets(rt.begin(), rt.end());
  sys.lhs.makeCompressed();
  sys.rhs.makeCompressed();
  return sys;
}

LinearSolver::LinearSolver(const SparseMatrix& a, std::size_t iterative_threshold)
    : a_(a), iterative_(static_cast<std::size_t>(a.rows()) > iterative_threshold) {
  if (iterative_) {
    krylov_.preconditioner().setDroptol(1e-6);
    krylov_.preconditioner().setFillfactor(20);
    krylov_.setTolerance(1e-13);
    krylov_.setMaxIterations(2000);
    krylov_.compute(a_);
    if (krylov_.info() != Eigen::Success) {
      throw NumericalError("LinearSolver: incomplete LU preconditioner failed");
    }
  } else {
    lu_.analyzePattern(a_);
    lu_.factorize(a_);
    if (lu_.info() != Eigen::Success) {
      throw NumericalError("LinearSolver: sparse LU factorization failed: " +
                           lu_.lastErrorMessage());
    }
  }
}

Eigen::VectorXd LinearSolver::solve(const Eigen::VectorXd& b) {
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    last_residual_ = 0.0;
    return Eigen::VectorXd::Zero(b.size());
  }
  Eigen::VectorXd x = iterative_ ? Eigen::VectorXd(krylov_.solve(b)) : Eigen::VectorXd(lu_.solve(b));
  last_residual_ = (a_ * x - b).norm() / bnorm;
  if (!std::isfinite(last_residual_) || last_residual_ > kResidualTolerance) {
    std::ostringstream os;
    os << "LinearSolver: relative residual " << last_residual_ << " exceeds "
       << kResidualTolerance << (iterative_ ? " (BiCGSTAB)" : " (sparse LU)");
    throw NumericalError(os.str());
  }
  return x;
}

double step(const SystemPair& sys, LinearSolver& solver, const Grid& grid,
            const ModelParams& params, std::span<const double> un, double t_next,
            std::vector<double>& out) {
  const Eigen::Map<const Eigen::VectorXd> u(un.data(), static_cast<Eigen::Index>(un.size()));
  Eigen::VectorXd b = sys.rhs * u;
  const double left = dirichlet_left(params, grid.x(-grid.N), t_next);
  for (auto row : sys.dirichlet_left) b[static_cast<Eigen::Index>(row)] = left;
  for (auto row : sys.dirichlet_right) b[static_cast<Eigen::Index>(row)] = 0.0;
  const Eigen::VectorXd x = solver.solve(b);
  out.assign(x.data(), x.data() + x.size());
  return solver.last_residual();
}

SolutionField initial_field(const Grid& grid) {
  SolutionField f;
  f.grid = grid;
  f.values.resize(grid.size());
  for (int i = -grid.N; i <= grid.N; ++i) {
    const double u0 = initial_condition(grid.x(i));
    for (int j = 0; j <= grid.M; ++j) f.values[grid.flat(i, j)] = u0;
  }
  return f;
}

SolveResult solve_pde(const ModelParams& params, const Grid& grid, const TimeLoopConfig& loop,
                      const AssemblyOptions& opts) {
  return solve_pde(params, grid, loop, opts, initial_field(grid).values);
}

SolveResult solve_pde(const ModelParams& params, const Grid& grid, const TimeLoopConfig& loop,
                      const AssemblyOptions& opts, std::vector<double> initial) {
  params.validate();
  if (loop.mu < 0.0 || loop.mu > 1.0) throw ConfigError("solve_pde: mu must lie in [0, 1]");
  if (loop.rannacher && loop.rannacher_substeps < 1) {
    throw ConfigError("solve_pde: rannacher_substeps must be >= 1");
  }
  if (initial.size() != grid.size()) throw ConfigError("solve_pde: initial field size mismatch");

  SolveResult res;
  res.field.grid = grid;
  res.field.values = std::move(initial);
  if (grid.n_steps == 0) return res;

  std::vector<double> next(grid.size());
  double t = 0.0;
  int first_full_step = 0;

  auto run = [&](const SystemPair& sys, LinearSolver& solver, int count, double dt, int tag) {
    for (int s = 0; s < count; ++s) {
      const double t_next = t + dt;
      double residual = 0.0;
      try {
        residual = step(sys, solver, grid, params, res.field.values, t_next, next);
      } catch (const NumericalError& e) {
        std::ostringstream os;
        os << "solve_pde: step " << tag << " failed: " << e.what();
        throw NumericalError(os.str());
      }
      res.field.values.swap(next);
      t = t_next;
      res.log.push_back({tag, t, residual});
      res.max_residual = std::max(res.max_residual, residual);
    }
  };

  if (loop.rannacher) {
    const int sub = loop.rannacher_substeps;
    const double dt = grid.k / sub;
    const auto sys = assemble(grid, params, dt, 1.0, opts);
    LinearSolver solver(sys.lhs);
    run(sys, solver, sub, dt, 0);
    t = grid.k;  // remove round-off from the sub-steps
    first_full_step = 1;
  }
  if (grid.n_steps > first_full_step) {
    const auto sys = assemble(grid, params, grid.k, loop.mu, opts);
    LinearSolver solver(sys.lhs);
    for (int n = first_full_step; n < grid.n_steps; ++n) {
      run(sys, solver, 1, grid.k, n);
      t = (n + 1) * grid.k;
    }
  }
  res.field.time_level = grid.n_steps;
  res.field.t = t;

  for (double u : res.field.values) {
    if (!std::isfinite(u)) throw NumericalError("solve_pde: non-finite value in solution");
    if (u < -0.01 || u > 1.01) res.range_warning = true;
  }
  return res;
}

double probe_price(const SolutionField& field, const ModelParams& params, double S,
                   double sigma) {
  const Grid& g = field.grid;
  const auto cp = to_computational(params, {S, sigma, params.T - field.t});
  const double x0 = g.x(-g.N), x1 = g.x(g.N), y0 = g.y(0), y1 = g.y(g.M);
  if (cp.x < x0 || cp.x > x1 || cp.y < y0 || cp.y > y1) {
    std::ostringstream os;
    os << "probe (S=" << S << ", sigma=" << sigma << ") lies outside the domain S in ["
       << params.K * std::exp(x0) << ", " << params.K * std::exp(x1) << "], sigma in ["
       << y0 * params.v << ", " << y1 * params.v << "]";
    throw DomainError(os.str());
  }
  const double fx = (cp.x - x0) / g.h();
  const double fy = (cp.y - y0) / g.h();
  const int ci = std::min(static_cast<int>(fx), 2 * g.N - 1);
  const int cj = std::min(static_cast<int>(fy), g.M - 1);
  const double ax = fx - ci, ay = fy - cj;
  const int i = ci - g.N;
  const double u = (1 - ax) * (1 - ay) * field.at(i, cj) + ax * (1 - ay) * field.at(i + 1, cj) +
                   (1 - ax) * ay * field.at(i, cj + 1) + ax * ay * field.at(i + 1, cj + 1);
  return u_to_price(params, u, field.t);
}

void write_surface_csv(std::ostream& os, const SolutionField& field, const ModelParams& params,
                       const std::map<std::string, std::string>& metadata) {
  for (const auto& [key, value] : metadata) os << "# " << key << " = " << value << '\n';
  os << "i,j,x,y,sigma,S,u,V\n";
  const auto old_precision = os.precision(17);
  const Grid& g = field.grid;
  for (int i = -g.N; i <= g.N; ++i) {
    for (int j = 0; j <= g.M; ++j) {
      const double x = g.x(i), y = g.y(j), u = field.at(i, j);
      os << i << ',' << j << ',' << x << ',' << y << ',' << y * params.v << ','
         << params.K * std::exp(x) << ',' << u << ',' << u_to_price(params, u, field.t) << '\n';
    }
  }
  os.precision(old_precision);
}

}  // namespace hoc
