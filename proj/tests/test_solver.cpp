#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <vector>

#include "hoc/analytic.hpp"
#include "hoc/error.hpp"
#include "hoc/grid.hpp"
#include "hoc/solver.hpp"

using namespace hoc;

namespace {

Grid grid_at(double h, double T = 0.5) {
  GridConfig gc;
  gc.h = h;
  gc.maturity = T;
  gc.allow_ratio_adjust = true;
  return build_grid(gc);
}

std::vector<double> gaussian(const Grid& g) {
  std::vector<double> u(g.size());
  for (int i = -g.N; i <= g.N; ++i)
    for (int j = 0; j <= g.M; ++j) {
      const double x = g.x(i), y = g.y(j) - 5.0;
      u[g.flat(i, j)] = std::exp(-2 * x * x - 0.2 * y * y);
    }
  return u;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t n = 0; n < a.size(); ++n) m = std::max(m, std::abs(a[n] - b[n]));
  return m;
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("interior rows carry nine entries within the band") {
  const auto g = grid_at(0.2);
  const auto sys = assemble(g, ModelParams{}, g.k, 0.5);
  const auto band = static_cast<long>(g.M + 2);
  for (int i = -g.N + 1; i < g.N; ++i)
    for (int j = 1; j < g.M; ++j) {
      const auto row = static_cast<long>(g.flat(i, j));
      int nnz = 0;
      const SparseMatrix rowm = sys.lhs.row(row);
      for (int c = 0; c < rowm.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(rowm, c); it; ++it) {
          ++nnz;
          CHECK(std::abs(it.col() - row) <= band);
        }
      CHECK(nnz == 9);
    }
  CHECK(sys.dirichlet_left.size() == static_cast<std::size_t>(g.M + 1));
  CHECK(sys.dirichlet_right.size() == static_cast<std::size_t>(g.M + 1));
}

TEST_CASE("grid too small for the boundary rows") {
  Grid g = grid_at(0.2);
  g.M = 2;
  CHECK_THROWS_AS(assemble(g, ModelParams{}, g.k, 0.5), ConfigError);
}

TEST_CASE("constants are preserved with r = 0 and Neumann sides") {
  ModelParams p;
  p.r = 0.0;
  const auto g = grid_at(0.2);
  AssemblyOptions opts;
  opts.boundary = BoundaryMode::kAllNeumann;
  const auto res = solve_pde(p, g, TimeLoopConfig{}, opts, std::vector<double>(g.size(), 1.0));
  for (double u : res.field.values) CHECK(std::abs(u - 1.0) <= 1e-12);
}

TEST_CASE("zero data stays zero") {
  ModelParams p;
  p.r = 0.0;
  const auto g = grid_at(0.2);
  AssemblyOptions opts;
  opts.boundary = BoundaryMode::kAllNeumann;
  const auto res = solve_pde(p, g, TimeLoopConfig{}, opts, std::vector<double>(g.size(), 0.0));
  for (double u : res.field.values) CHECK(u == 0.0);
}

TEST_CASE("a reversed Crank-Nicolson step undoes a forward step") {
  const ModelParams p;
  const auto g = grid_at(0.2);
  AssemblyOptions fwd, bwd;
  fwd.boundary = bwd.boundary = BoundaryMode::kAllNeumann;
  bwd.reverse = true;
  // Short step: the reversed system is an anti-diffusive solve and loses
  // conditioning quickly as k grows.
  const double k = 1e-3;
  const auto a = assemble(g, p, k, 0.5, fwd);
  const auto b = assemble(g, p, k, 0.5, bwd);
  LinearSolver sa(a.lhs), sb(b.lhs);
  // A forward step gives a start field that already satisfies the
  // extrapolation rows on all four sides.
  std::vector<double> u0, u1, u2;
  step(a, sa, g, p, gaussian(g), k, u0);
  step(a, sa, g, p, u0, 2 * k, u1);
  step(b, sb, g, p, u1, k, u2);
  CHECK(max_diff(u2, u0) <= 1e-8);
  CHECK(max_diff(u1, u0) > 1e-6);
}

TEST_CASE("second order in time") {
  const ModelParams p;
  auto g = grid_at(0.2);
  AssemblyOptions opts;
  opts.boundary = BoundaryMode::kAllNeumann;
  TimeLoopConfig loop;
  loop.rannacher = false;
  auto run = [&](int steps) {
    Grid gg = g;
    gg.n_steps = steps;
    gg.k = gg.maturity / steps;
    return solve_pde(p, gg, loop, opts, gaussian(gg)).field.values;
  };
  const auto ref = run(640);
  std::vector<std::pair<double, double>> rec;
  for (int steps : {10, 20, 40}) rec.emplace_back(0.5 / steps, max_diff(run(steps), ref));
  const double m = std::log(rec[0].second / rec[2].second) / std::log(rec[0].first / rec[2].first);
  CHECK(m >= 1.7);
  CHECK(m <= 2.3);
}

TEST_CASE("zero maturity returns the payoff") {
  const auto g = grid_at(0.2, 0.0);
  CHECK(g.n_steps == 0);
  const auto res = solve_pde(ModelParams{}, g, TimeLoopConfig{});
  for (int i = -g.N; i <= g.N; ++i)
    for (int j = 0; j <= g.M; ++j) CHECK(res.field.at(i, j) == initial_condition(g.x(i)));
}

TEST_CASE("put surface behaves") {
  const ModelParams p;
  const auto g = grid_at(0.1);
  const auto res = solve_pde(p, g, TimeLoopConfig{});
  CHECK(res.field.t == doctest::Approx(p.T).epsilon(1e-12));
  CHECK(res.field.time_level == g.n_steps);
  CHECK(res.max_residual <= LinearSolver::kResidualTolerance);

  SUBCASE("boundary rows hold") {
    const double left = dirichlet_left(p, g.x(-g.N), res.field.t);
    for (int j = 0; j <= g.M; ++j) {
      CHECK(res.field.at(-g.N, j) == doctest::Approx(left).epsilon(1e-12));
      CHECK(std::abs(res.field.at(g.N, j)) <= 1e-14);
    }
    for (int i = -g.N + 1; i < g.N; ++i) {
      CHECK(std::abs(res.field.at(i, 0) - neumann_extrapolate(res.field.at(i, 1), res.field.at(i, 2),
                                                               res.field.at(i, 3))) <= 1e-10);
      CHECK(std::abs(res.field.at(i, g.M) -
                     neumann_extrapolate(res.field.at(i, g.M - 1), res.field.at(i, g.M - 2),
                                         res.field.at(i, g.M - 3))) <= 1e-10);
    }
  }
  SUBCASE("monotone in S and inside [0, K]") {
    for (double sigma : {0.1, 0.2, 0.4}) {
      double prev = p.K;
      for (double S = 50; S <= 150; S += 5) {
        const double V = probe_price(res.field, p, S, sigma);
        CHECK(V >= -1e-3 * p.K);
        CHECK(V <= p.K);
        CHECK(V <= prev + 1e-6);
        prev = V;
      }
    }
  }
  SUBCASE("close to the semi-closed form") {
    for (double S : {80.0, 100.0, 120.0})
      for (double sigma : {0.1, 0.2})
        CHECK(std::abs(probe_price(res.field, p, S, sigma) - heston_put(p, S, sigma, 0.0)) <= 1e-2 * p.K);
  }
  SUBCASE("probe outside the grid") {
    CHECK_THROWS_AS(probe_price(res.field, p, 1.0, 0.1), DomainError);
    CHECK_THROWS_AS(probe_price(res.field, p, 100.0, 5.0), DomainError);
  }
}

TEST_CASE("central scheme runs on the same grid") {
  const ModelParams p;
  const auto g = grid_at(0.1);
  AssemblyOptions opts;
  opts.scheme = Scheme::kCentral;
  const auto res = solve_pde(p, g, TimeLoopConfig{}, opts);
  CHECK(std::abs(probe_price(res.field, p, 100, 0.2) - heston_put(p, 100, 0.2, 0.0)) <= 1e-2 * p.K);
}

TEST_CASE("bad time loop settings") {
  const auto g = grid_at(0.2);
  TimeLoopConfig loop;
  loop.mu = 1.5;
  CHECK_THROWS_AS(solve_pde(ModelParams{}, g, loop), ConfigError);
  CHECK_THROWS_AS(solve_pde(ModelParams{}, g, TimeLoopConfig{}, {}, std::vector<double>(3)), ConfigError);
}

TEST_CASE("surface csv") {
  const ModelParams p;
  const auto g = grid_at(0.4);
  const auto res = solve_pde(p, g, TimeLoopConfig{});
  std::ostringstream os;
  write_surface_csv(os, res.field, p, {{"grid.h", "0.4"}});
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "# grid.h = 0.4");
  std::getline(is, line);
  CHECK(line == "i,j,x,y,sigma,S,u,V");
  std::size_t rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == g.size());
}

}
