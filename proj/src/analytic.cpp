#include "hoc/analytic.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>
#include <vector>

#include "hoc/error.hpp"

namespace hoc {
namespace {

using cplx = std::complex<double>;
constexpr cplx I{0.0, 1.0};

// C + sigma D + i xi ln S for the k-th probability.
cplx log_f(const ModelParams& p, double S, double sigma, double tau, double xi, int k,
           Formulation form) {
  const double v = p.v;
  const double a = p.kappa_star * p.theta_star;
  const cplx b = p.kappa() - p.rho * v * (I * xi + (k == 1 ? 1.0 : 0.0));
  const cplx d = std::sqrt((xi * xi + (k == 1 ? -1.0 : 1.0) * I * xi) * v * v + b * b);
  cplx C;
  cplx D;
  if (form == Formulation::kTrapSafe) {
    // d -> -d; exp(-d tau) stays bounded because Re d >= 0.
    const cplx g = (b - d) / (b + d);
    const cplx e = std::exp(-d * tau);
    C = I * p.r * xi * tau + a / (v * v) * ((b - d) * tau - 2.0 * std::log((1.0 - g * e) / (1.0 - g)));
    D = (b - d) / (v * v) * (1.0 - e) / (1.0 - g * e);
  } else {
    const cplx g = (b + d) / (b - d);
    const cplx e = std::exp(d * tau);
    C = I * p.r * xi * tau + a / (v * v) * ((b + d) * tau - 2.0 * std::log((1.0 - g * e) / (1.0 - g)));
    D = (b + d) / (v * v) * (1.0 - e) / (1.0 - g * e);
  }
  return C + sigma * D + I * xi * std::log(S);
}

cplx integrand_value(const ModelParams& p, double S, double sigma, double tau, double xi, int k,
                     Formulation form) {
  const cplx e = log_f(p, S, sigma, tau, xi, k, form) - I * xi * std::log(p.K);
  if (!std::isfinite(e.real()) || e.real() > 700.0) {
    std::ostringstream os;
    os << "characteristic exponent overflow at xi=" << xi << " (k=" << k << ")";
    throw NumericalError(os.str());
  }
  return std::exp(e) / (I * xi);
}

// Smallest multiple of 5 past which |integrand| stays below tail_tol for both k.
double upper_limit(const ModelParams& p, double S, double sigma, double tau,
                   const QuadratureOptions& q) {
  auto small = [&](double xi) {
    for (int k : {1, 2})
      if (std::abs(integrand_value(p, S, sigma, tau, xi, k, q.formulation)) >= q.tail_tol)
        return false;
    return true;
  };
  for (double xi = 5.0; xi < q.max_upper; xi += 5.0)
    if (small(xi) && small(xi + 2.5) && small(xi + 5.0)) return xi + 5.0;
  return q.max_upper;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace

double heston_integrand(const ModelParams& p, double S, double sigma, double tau, double xi,
                        int k_index, Formulation form) {
  if (k_index != 1 && k_index != 2) throw DomainError("k_index must be 1 or 2");
  if (!(xi > 0.0)) throw DomainError("integrand requires xi > 0");
  return integrand_value(p, S, sigma, tau, xi, k_index, form).real();
}

double heston_probability(const ModelParams& p, double S, double sigma, double tau, int k_index,
                          const QuadratureOptions& q) {
  if (!(S > 0.0)) throw DomainError("spot must be positive");
  if (tau <= 0.0) return S > p.K ? 1.0 : 0.0;
  const double upper = upper_limit(p, S, sigma, tau, q);
  auto f = [&](double xi) { return heston_integrand(p, S, sigma, tau, xi, k_index, q.formulation); };
  double err = 0.0;
  const double val =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, upper, 12, 1e-12, &err);
  if (!std::isfinite(val) || err > q.abs_tol) {
    std::ostringstream os;
    os << "quadrature for P" << k_index << " did not converge (error estimate " << err << ")";
    throw NumericalError(os.str());
  }
  return 0.5 + val / std::numbers::pi;
}

double heston_call(const ModelParams& p, double S, double sigma, double t,
                   const QuadratureOptions& q) {
  const double tau = p.T - t;
  const double disc = p.K * std::exp(-p.r * tau);
  if (tau <= 0.0) return std::max(S - p.K, 0.0);
  return S * heston_probability(p, S, sigma, tau, 1, q) -
         disc * heston_probability(p, S, sigma, tau, 2, q);
}

double heston_put(const ModelParams& p, double S, double sigma, double t,
                  const QuadratureOptions& q) {
  if (!(S > 0.0)) throw DomainError("spot must be positive");
  const double tau = p.T - t;
  if (tau <= 0.0) return std::max(p.K - S, 0.0);
  const double disc = p.K * std::exp(-p.r * tau);
  const double p1 = heston_probability(p, S, sigma, tau, 1, q);
  const double p2 = heston_probability(p, S, sigma, tau, 2, q);
  const double put = disc * (1.0 - p2) - S * (1.0 - p1);
  return std::clamp(put, std::max(disc - S, 0.0), disc);
}

double bs_put(double S, double K, double r, double tau, double var) {
  const double disc = K * std::exp(-r * tau);
  if (tau <= 0.0 || var <= 0.0) return std::max(disc - S, 0.0);
  const double sd = std::sqrt(var * tau);
  const double d1 = (std::log(S / K) + (r + 0.5 * var) * tau) / sd;
  const double d2 = d1 - sd;
  return disc * normal_cdf(-d2) - S * normal_cdf(-d1);
}

McResult mc_put(const ModelParams& p, double S, double sigma, double t, const McConfig& cfg) {
  if (cfg.n_paths < 1 || cfg.n_steps < 1 || cfg.batch_size < 1)
    throw ConfigError("mc: n_paths, n_steps and batch_size must be >= 1");
  if (!(S > 0.0)) throw DomainError("spot must be positive");
  const double tau = p.T - t;
  const double dt = tau / cfg.n_steps;
  const double sq_dt = std::sqrt(dt);
  const double kappa = p.kappa();
  const double theta = p.theta();
  const double rho_c = std::sqrt(std::max(0.0, 1.0 - p.rho * p.rho));
  const double disc = std::exp(-p.r * tau);
  const double x0 = std::log(S);

  const std::int64_t n_batches = (cfg.n_paths + cfg.batch_size - 1) / cfg.batch_size;
  struct Acc {
    double sum = 0.0;
    double sum_sq = 0.0;
  };
  std::vector<Acc> acc(static_cast<std::size_t>(n_batches));

  auto run_batch = [&](std::int64_t b) {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> nd;
    const std::int64_t first = b * cfg.batch_size;
    const std::int64_t count = std::min(cfg.batch_size, cfg.n_paths - first);
    Acc a;
    for (std::int64_t n = 0; n < count; ++n) {
      double x = x0;
      double s = sigma;
      for (int m = 0; m < cfg.n_steps; ++m) {
        const double z1 = nd(rng);
        const double z2 = p.rho * z1 + rho_c * nd(rng);
        const double sp = std::max(s, 0.0);
        const double vol = std::sqrt(sp) * sq_dt;
        x += (p.r - 0.5 * sp) * dt + vol * z1;
        s += kappa * (theta - sp) * dt + p.v * vol * z2;
      }
      const double payoff = disc * std::max(p.K - std::exp(x), 0.0);
      a.sum += payoff;
      a.sum_sq += payoff * payoff;
    }
    acc[static_cast<std::size_t>(b)] = a;
  };

  const int nthreads = std::max(1, std::min<int>(cfg.threads, static_cast<int>(n_batches)));
  if (nthreads == 1) {
    for (std::int64_t b = 0; b < n_batches; ++b) run_batch(b);
  } else {
    std::atomic<std::int64_t> next{0};
    std::vector<std::jthread> pool;
    for (int w = 0; w < nthreads; ++w)
      pool.emplace_back([&] {
        for (std::int64_t b; (b = next.fetch_add(1)) < n_batches;) run_batch(b);
      });
  }

  Acc total;
  for (const Acc& a : acc) {
    total.sum += a.sum;
    total.sum_sq += a.sum_sq;
  }
  const double n = static_cast<double>(cfg.n_paths);
  McResult out;
  out.paths = cfg.n_paths;
  out.price = total.sum / n;
  const double var = std::max(0.0, total.sum_sq / n - out.price * out.price);
  out.std_error = cfg.n_paths > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
  return out;
}

}  // namespace hoc
