#include <doctest.h>

#include <cmath>
#include <random>

#include "hoc/error.hpp"
#include "hoc/model.hpp"

using namespace hoc;

TEST_SUITE("model") {

TEST_CASE("modified parameters") {
  ModelParams p;
  auto m = modified_params(p);
  CHECK(m.kappa == 2.0);
  CHECK(m.theta == doctest::Approx(0.1).epsilon(1e-15));

  p.kappa_star = 1.5;
  p.theta_star = 0.2;
  p.lambda0 = 0.5;
  m = modified_params(p);
  CHECK(m.kappa == doctest::Approx(2.0));
  CHECK(m.theta == doctest::Approx(0.15).epsilon(1e-15));

  p.kappa_star = 1.0;
  p.theta_star = 0.1;
  p.lambda0 = -1.0;
  CHECK_THROWS_AS(modified_params(p), ConfigError);
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("zero risk premium leaves kappa and theta unchanged") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.01, 5.0);
  for (int n = 0; n < 100; ++n) {
    ModelParams p;
    p.kappa_star = u(rng);
    p.theta_star = u(rng);
    const auto m = modified_params(p);
    CHECK(m.kappa == p.kappa_star);
    CHECK(m.theta == doctest::Approx(p.theta_star).epsilon(1e-15));
  }
}

TEST_CASE("validate rejects bad parameters") {
  auto bad = [](auto mutate) {
    ModelParams p;
    mutate(p);
    return p;
  };
  CHECK_NOTHROW(ModelParams{}.validate());
  CHECK_THROWS_AS(bad([](ModelParams& p) { p.v = 0; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](ModelParams& p) { p.K = -1; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](ModelParams& p) { p.T = 0; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](ModelParams& p) { p.rho = -1.5; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](ModelParams& p) { p.theta_star = 0; }).validate(), ConfigError);
}

TEST_CASE("to_computational examples") {
  ModelParams p;
  auto c = to_computational(p, {100.0, 0.1, p.T});
  CHECK(c.x == 0.0);
  CHECK(c.y == doctest::Approx(1.0));
  CHECK(c.t_tilde == 0.0);

  c = to_computational(p, {100.0 * std::exp(1.0), 0.2, 0.0});
  CHECK(c.x == doctest::Approx(1.0).epsilon(1e-15));

  c = to_computational(p, {50.0, 0.2, 0.0});
  CHECK(c.x == doctest::Approx(std::log(0.5)).epsilon(1e-15));
  CHECK(c.x == doctest::Approx(-0.6931).epsilon(1e-4));

  CHECK_THROWS_AS(to_computational(p, {0.0, 0.1, 0.0}), DomainError);
  CHECK_THROWS_AS(to_computational(p, {-3.0, 0.1, 0.0}), DomainError);
}

TEST_CASE("round trip between coordinate systems") {
  ModelParams p;
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> S(1.0, 500.0), sig(0.0, 1.0), t(0.0, 0.5);
  for (int n = 0; n < 1000; ++n) {
    const FinancialPoint fp{S(rng), sig(rng), t(rng)};
    const auto back = to_financial(p, to_computational(p, fp));
    CHECK(std::abs(back.S - fp.S) <= 1e-14 * fp.S);
    CHECK(std::abs(back.sigma - fp.sigma) <= 1e-14 * std::max(fp.sigma, 1e-300));
    CHECK(std::abs(back.t - fp.t) <= 1e-14 * std::max(fp.t, 1.0));
  }
}

TEST_CASE("u_to_price examples") {
  ModelParams p;
  p.r = 0.0;
  CHECK(u_to_price(p, 1.0, 0.3) == 100.0);
  CHECK(u_to_price(p, 0.0, 0.3) == 0.0);
  p.r = 0.05;
  CHECK(u_to_price(p, 1.0, 0.5) == doctest::Approx(97.531).epsilon(1e-5));
  CHECK(price_to_u(p, u_to_price(p, 0.37, 0.2), 0.2) == doctest::Approx(0.37).epsilon(1e-15));
}

TEST_CASE("initial condition") {
  CHECK(initial_condition(0.0) == 0.0);
  CHECK(initial_condition(std::log(0.5)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(initial_condition(2.0) == 0.0);
  // continuity at the kink and monotonicity
  CHECK(initial_condition(-1e-12) == doctest::Approx(1e-12).epsilon(1e-6));
  double prev = initial_condition(-10.0);
  for (double x = -10.0; x <= 10.0; x += 0.01) {
    const double v = initial_condition(x);
    CHECK(v <= prev);
    prev = v;
  }
}

TEST_CASE("payoff maps to the put payoff") {
  ModelParams p;
  for (double S = 1.0; S <= 300.0; S += 0.5) {
    const double x = std::log(S / p.K);
    const double V = u_to_price(p, initial_condition(x), 0.0);
    const double payoff = std::max(p.K - S, 0.0);
    CHECK(std::abs(V - payoff) <= 1e-12 * p.K);
  }
}

TEST_CASE("left boundary value") {
  ModelParams p;
  p.r = 0.0;
  const double Nh = 2.0;
  CHECK(dirichlet_left(p, -Nh, 0.3) == doctest::Approx(1.0 - std::exp(-Nh)).epsilon(1e-15));
  CHECK(dirichlet_left(p, -60.0, 0.0) == doctest::Approx(1.0));
  p.r = 0.05;
  CHECK(dirichlet_left(p, -2.0, 0.5) == doctest::Approx(1.0 - std::exp(-1.975)).epsilon(1e-14));
  CHECK(dirichlet_left(p, -2.0, 0.5) == doctest::Approx(0.8612).epsilon(1e-4));
}

}
