#pragma once

#include <complex>
#include <cstdint>

#include "hoc/model.hpp"

namespace hoc {

/// Which algebraic form of the characteristic exponent to use. Both are the
/// same function; the printed one crosses log branches for long maturities.
enum class Formulation { kTrapSafe, kAsPrinted };

struct QuadratureOptions {
  double abs_tol = 1e-8;
  double tail_tol = 1e-12;   // integrand magnitude that ends the range
  double max_upper = 500.0;  // fallback upper limit
  Formulation formulation = Formulation::kTrapSafe;
};

/// Re[e^{-i xi ln K} f_k(xi) / (i xi)] for k = 1, 2 and tau = T - t.
double heston_integrand(const ModelParams& p, double S, double sigma, double tau, double xi,
                        int k_index, Formulation form = Formulation::kTrapSafe);

/// P_k = 1/2 + (1/pi) int_0^inf integrand. These are the in-the-money
/// probabilities of the call.
double heston_probability(const ModelParams& p, double S, double sigma, double tau, int k_index,
                          const QuadratureOptions& q = {});

double heston_call(const ModelParams& p, double S, double sigma, double t,
                   const QuadratureOptions& q = {});

/// European put at calendar time t (tau = T - t). Throws NumericalError when
/// the quadrature misses its tolerance.
double heston_put(const ModelParams& p, double S, double sigma, double t,
                  const QuadratureOptions& q = {});

/// Black-Scholes put with constant variance `var` (the v -> 0 limit).
double bs_put(double S, double K, double r, double tau, double var);

struct McConfig {
  std::int64_t n_paths = 100'000;
  int n_steps = 200;
  std::uint64_t seed = 42;
  int threads = 1;
  /// Paths per independently seeded stream. Results depend on (seed,
  /// batch_size) only, never on the thread count.
  std::int64_t batch_size = 8192;
};

struct McResult {
  double price = 0.0;
  double std_error = 0.0;
  std::int64_t paths = 0;
};

/// Log-Euler for S and full-truncation Euler for sigma under the pricing
/// measure (drift r, modified kappa/theta), horizon T - t.
McResult mc_put(const ModelParams& p, double S, double sigma, double t, const McConfig& cfg);

}  // namespace hoc
