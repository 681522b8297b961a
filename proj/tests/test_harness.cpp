#include <doctest.h>

#include <atomic>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "hoc/config.hpp"
#include "hoc/error.hpp"
#include "hoc/harness.hpp"

using namespace hoc;

namespace {

SolutionField field_on(double h, double offset, double fill) {
  GridConfig gc;
  gc.h = h;
  gc.offset_mode = OffsetMode::kExplicit;
  gc.offset = offset;
  gc.maturity = 0;
  SolutionField f;
  f.grid = build_grid(gc);
  f.values.assign(f.grid.size(), fill);
  return f;
}

Config small_study() {
  Config cfg = default_config();
  cfg.study.ladder = {0.4, 0.2, 0.1};
  cfg.study.reference_h = 0.05;
  return cfg;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("identical fields have no error") {
  const auto a = field_on(0.2, 0.1, 0.3);
  const auto n = error_norms(a, a);
  CHECK(n.eps2 == 0.0);
  CHECK(n.eps_inf == 0.0);
  CHECK(n.nodes == static_cast<std::size_t>((2 * a.grid.N - 1) * (a.grid.M - 1)));
}

TEST_CASE("constant error") {
  const double c = 0.25;
  const auto fine = field_on(0.1, 0.1, 1.0);
  const auto coarse = field_on(0.2, 0.1, 1.0 + c);
  const auto n = error_norms(coarse, fine);
  const auto P = static_cast<double>(n.nodes);
  CHECK(n.eps_inf == doctest::Approx(c).epsilon(1e-14));
  CHECK(n.eps2 == doctest::Approx(c * 0.2 * std::sqrt(P)).epsilon(1e-12));
  const auto e = error_field(coarse, fine);
  CHECK(e[coarse.grid.flat(0, 3)] == doctest::Approx(c));
  CHECK(e[coarse.grid.flat(coarse.grid.N, 3)] == 0.0);
}

TEST_CASE("non-nested grids are rejected") {
  const auto a = field_on(0.2, 0.1, 0.0);
  const auto b = field_on(0.1, 0.05, 0.0);
  CHECK_THROWS_WITH_AS(error_norms(a, b), doctest::Contains("non-nested"), DomainError);
}

TEST_CASE("slope fit") {
  std::vector<std::pair<double, double>> two, four;
  for (double h : {0.4, 0.2, 0.1, 0.05}) {
    two.emplace_back(h, 2 * h * h);
    four.emplace_back(h, 5 * std::pow(h, 4));
  }
  const auto a = fit_slope(two), b = fit_slope(four);
  CHECK(std::abs(a.m - 2) <= 1e-12);
  CHECK(std::abs(a.C - 2) <= 1e-12);
  CHECK(std::abs(b.m - 4) <= 1e-12);
  CHECK(std::abs(b.C - 5) <= 1e-11);

  two.emplace_back(0.025, 0.0);
  const auto c = fit_slope(two);
  CHECK(c.excluded == 1);
  CHECK(c.used == 4);
  CHECK(std::abs(c.m - 2) <= 1e-12);

  CHECK_THROWS_AS(fit_slope({{0.2, 1.0}, {0.1, 0.0}, {0.05, 0.1}}), DomainError);
}

TEST_CASE("level grids share the offset with their reference") {
  GridConfig base;
  const auto g = level_grid(base, 0.2);
  CHECK(g.offset_mode == OffsetMode::kExplicit);
  CHECK(g.offset == 0.1);
  base.offset_mode = OffsetMode::kNone;
  CHECK(level_grid(base, 0.2).offset_mode == OffsetMode::kNone);
}

TEST_CASE("parallel_for visits every index once") {
  std::vector<std::atomic<int>> hits(50);
  parallel_for(hits.size(), 3, [&](std::size_t i) { hits[i]++; });
  for (const auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(4, 2, [](std::size_t i) {
                    if (i == 2) throw NumericalError("boom");
                  }),
                  NumericalError);
}

TEST_CASE("convergence study is reproducible") {
  const Config cfg = small_study();
  SolveCache cache;
  const auto a = run_convergence(cfg, &cache);
  REQUIRE(a.error.empty());
  CHECK(a.records.size() == 3);
  for (std::size_t i = 1; i < a.records.size(); ++i) CHECK(a.records[i].eps2 < a.records[i - 1].eps2);
  const auto b = run_convergence(cfg);

  std::ostringstream oa, ob, sa;
  write_convergence_csv(oa, a, cfg);
  write_convergence_csv(ob, b, cfg);
  CHECK(oa.str() == ob.str());
  write_slope_txt(sa, a);
  CHECK(sa.str().rfind("norm,m,C\neps2,", 0) == 0);

  std::istringstream is(oa.str());
  CHECK(parse_metadata(is) == cfg);
}

TEST_CASE("bad ladders") {
  Config cfg = small_study();
  cfg.study.ladder = {0.1, 0.2, 0.4};
  CHECK_THROWS_AS(run_convergence(cfg), ConfigError);
  cfg.study.ladder = {0.4, 0.2, 0.1};
  cfg.study.reference_h = 0.1;
  CHECK_THROWS_AS(run_convergence(cfg), ConfigError);
}

TEST_CASE("a failing level aborts with a message") {
  Config cfg = small_study();
  cfg.grid.x_half_width = 2.1;  // no integer N at h = 0.4
  const auto rep = run_convergence(cfg);
  CHECK_FALSE(rep.error.empty());
}

TEST_CASE("small stability map") {
  Config cfg = default_config();
  cfg.study.ratios = {0.5, 1.0};
  cfg.study.map_h = {0.4, 0.2};
  cfg.study.reference_h = 0.1;
  const auto map = run_stability_map(cfg);
  CHECK(map.cells.size() == 4);
  CHECK(map.spread.size() == 2);
  for (const auto& c : map.cells) {
    CHECK(std::isfinite(c.eps2));
    CHECK(c.actual_ratio <= c.ratio + 1e-12);
  }
  CHECK(map.at(1, 0).ratio == 1.0);
  CHECK(map.at(1, 0).h == 0.4);
  std::ostringstream os;
  write_stability_map_csv(os, map, cfg);
  CHECK(os.str().find("ratio,h,eps2,flag") != std::string::npos);
  CHECK(std::string(to_string(CellFlag::kOscillation)) == "oscillation");
}

}
