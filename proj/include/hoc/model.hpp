#pragma once

// Heston model constants and the map between financial coordinates
// (S, sigma, t) and the computational ones (x, y, t_tilde):
//
//   x = ln(S/K),  y = sigma / v,  t_tilde = T - t,  u = exp(r t_tilde) V / K.
//
// In computational variables the put value solves
//
//   u_t - 1/2 v y (u_xx + u_yy) - rho v y u_xy + (1/2 v y - r) u_x
//       - kappa (theta - v y)/v u_y = 0
//
// with u(x, y, 0) = max(1 - e^x, 0).

namespace hoc {

struct ModelParams {
  double r = 0.05;            // riskless rate
  double v = 0.1;             // volatility of variance
  double kappa_star = 2.0;    // mean-reversion speed under the real-world measure
  double theta_star = 0.1;    // long-run variance
  double lambda0 = 0.0;       // risk premium coefficient, lambda = lambda0 * sigma
  double rho = -0.5;          // correlation
  double K = 100.0;           // strike
  double T = 0.5;             // maturity

  /// Throws ConfigError when an invariant is violated.
  void validate() const;

  double kappa() const { return kappa_star + lambda0; }
  double theta() const { return kappa_star * theta_star / (kappa_star + lambda0); }

  bool operator==(const ModelParams&) const = default;
};

/// The default experiment parameters (K=100, T=0.5, r=0.05, v=0.1,
/// kappa=2, theta=0.1, rho=-0.5, lambda0=0).
ModelParams default_params();

struct ModifiedParams {
  double kappa;
  double theta;
};

ModifiedParams modified_params(const ModelParams& p);

struct FinancialPoint {
  double S;
  double sigma;
  double t;
};

struct ComputationalPoint {
  double x;
  double y;
  double t_tilde;
};

ComputationalPoint to_computational(const ModelParams& p, const FinancialPoint& fp);
FinancialPoint to_financial(const ModelParams& p, const ComputationalPoint& cp);

/// V = K exp(-r t_tilde) u.
double u_to_price(const ModelParams& p, double u, double t_tilde);
double price_to_u(const ModelParams& p, double V, double t_tilde);

/// Transformed put payoff max(1 - e^x, 0).
double initial_condition(double x);

/// Value imposed on the left x-boundary at time t_tilde: 1 - exp(r t + x_left).
double dirichlet_left(const ModelParams& p, double x_left, double t_tilde);

}  // namespace hoc
