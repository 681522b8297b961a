#include "hoc/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <thread>

#include "hoc/error.hpp"
#include "hoc/stencil.hpp"

namespace hoc {
namespace {

using cplx = std::complex<double>;

struct Sums {
  cplx num;   // sum zeta e
  cplx den;   // sum beta e
  cplx diff;  // sum (zeta - beta) e, formed term by term
};

Sums symbol_sums(const AmplificationQuery& q) {
  const PdeCoefficients c{q.v, q.r, q.kappa, q.theta, q.rho};
  auto w = parabolic_weights(c, q.y, q.h, q.k, q.mu);
  const double beta0 = w.beta[kC];
  w.beta[kC] = beta0 * q.beta0_scale;
  Sums s;
  for (std::size_t l = 0; l < 9; ++l) {
    const auto [di, dj] = kStencilOffsets[l];
    const cplx e = std::polar(1.0, di * q.z1 + dj * q.z2);
    s.num += w.zeta[l] * e;
    s.den += w.beta[l] * e;
    // zeta_l - beta_l is exactly -24 v^3 h^2 y k alpha_l for an unperturbed
    // row, but the subtraction below keeps the hook honest.
    s.diff += (w.zeta[l] - w.beta[l]) * e;
  }
  return s;
}

void check_den(const Sums& s) {
  if (!(std::abs(s.den) > 1e-300) || !std::isfinite(std::abs(s.den)))
    throw NumericalError("amplification factor: vanishing denominator");
}

}  // namespace

TrigVars trig_vars(const AmplificationQuery& q) {
  TrigVars t{};
  t.c1 = std::cos(q.z1 / 2);
  t.c2 = std::cos(q.z2 / 2);
  t.s1 = std::sin(q.z1 / 2);
  t.s2 = std::sin(q.z2 / 2);
  t.W = 2.0 * (q.theta - q.v * q.y) * t.s2 / q.v;
  t.V = 2.0 * q.v * q.y * t.s1 / q.kappa;
  return t;
}

std::complex<double> amplification_factor(const AmplificationQuery& q) {
  const Sums s = symbol_sums(q);
  check_den(s);
  return s.num / s.den;
}

double amplification_excess(const AmplificationQuery& q) {
  const Sums s = symbol_sums(q);
  check_den(s);
  // |n|^2 - |d|^2 = Re((n - d) conj(n + d))
  return std::real(s.diff * std::conj(s.num + s.den)) / std::norm(s.den);
}

FValues f_functions(double c1, double c2) {
  const double a = c1 * c1, b = c2 * c2;
  return {
      2 * a * b + a + b - 4,
      a + b + 1,
      2 * a * b - a - 1,
      2 * a * b - b - 1,
      4 * a * a * b - 2 * a - b + 8,
      4 * a * b * b - 2 * b - a + 8,
      4 * b * b * a * a - 2 * a * a * b - 2 * a * b * b + 6 * a * b + a + b - 8,
  };
}

ClosedFormTerms closed_form_criterion(const AmplificationQuery& q) {
  if (q.rho != 0.0 || q.r != 0.0 || q.mu != 0.5)
    throw DomainError("closed form requires rho = 0, r = 0, mu = 1/2");
  const TrigVars t = trig_vars(q);
  const auto f = f_functions(t.c1, t.c2);
  const double f1 = f[0], f2 = f[1], f3 = f[2], f4 = f[3], f5 = f[4], f6 = f[5];
  const double K = q.kappa, k = q.k, h = q.h;
  const double V = t.V, W = t.W, s1 = t.s1, c1 = t.c1, c2 = t.c2;
  const double K2 = K * K, K3 = K2 * K, K4 = K3 * K;
  const double V2 = V * V, V3 = V2 * V, V4 = V3 * V;
  const double W2 = W * W;
  const double s12 = s1 * s1, s13 = s12 * s1, s14 = s13 * s1;

  ClosedFormTerms c{};
  c.n4 = -4 * V * K3 * f3 * s13 * W2 - V3 * K3 * f4 * s13;
  c.n2 = -4 * V3 * K3 * f2 * f1 * s1;
  const double e6 = -2 * W * c2 + V * c1;
  c.d6 = 4 * e6 * e6 * K2 * s14;
  const double e4 = V2 - 4 * V * c1 * W * c2 + 4 * W2;
  c.d4 = 0.25 * K4 * s14 * e4 * e4 * k * k - 4 * V * K3 * s13 * (f4 * V2 + 4 * f3 * W2) * k +
         16 * K2 * V2 * f2 * f2 * s12;
  c.d2 = V2 * K4 * s12 * (V2 * f6 - 36 * V * c1 * W * c2 + 4 * f5 * W2) * k * k -
         16 * V3 * K3 * f2 * f1 * s1 * k;
  c.d0 = 4 * V4 * K4 * f1 * f1 * k * k;

  const double h2 = h * h;
  c.numerator = -8 * k * h2 * (c.n4 * h2 + c.n2);
  c.denominator = ((c.d6 * h2 + c.d4) * h2 + c.d2) * h2 + c.d0;
  if (!(c.denominator > 0.0))
    throw NumericalError("closed form: non-positive denominator");
  c.value = c.numerator / c.denominator;
  return c;
}

double d22(double c1, double c2, double s1, double V, double W, double kappa) {
  const auto f = f_functions(c1, c2);
  const double K4 = std::pow(kappa, 4);
  return V * V * K4 * s1 * s1 * (V * V * f[5] - 36 * V * c1 * W * c2 + 4 * f[4] * W * W);
}

double d22_printed_minimum(double c1, double c2, double s1, double V, double kappa) {
  const auto f = f_functions(c1, c2);
  return 2 * std::pow(V, 4) * std::pow(kappa, 4) * s1 * s1 * f[0] * f[6] / f[4];
}

namespace {

constexpr std::size_t kDims = 11;
using Point = std::array<double, kDims>;

std::array<Interval, kDims> box_axes(const SearchBox& b) {
  return {b.h, b.k, b.y, b.v, b.kappa, b.theta, b.rho, b.r, b.mu, b.z1, b.z2};
}

AmplificationQuery to_query(const Point& p, double beta0_scale) {
  AmplificationQuery q;
  q.h = p[0];
  q.k = p[1];
  q.y = p[2];
  q.v = p[3];
  q.kappa = p[4];
  q.theta = p[5];
  q.rho = p[6];
  q.r = p[7];
  q.mu = p[8];
  q.z1 = p[9];
  q.z2 = p[10];
  q.beta0_scale = beta0_scale;
  return q;
}

// -inf marks a singular query so it never wins the max.
double safe_excess(const AmplificationQuery& q) {
  try {
    const double v = amplification_excess(q);
    return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
  } catch (const NumericalError&) {
    return -std::numeric_limits<double>::infinity();
  }
}

}  // namespace

SearchResult stability_search(const SearchBox& box, const SearchOptions& opt) {
  if (opt.samples < 1) throw ConfigError("stability search: samples must be >= 1");
  const auto axes = box_axes(box);
  for (const auto& a : axes)
    if (!(a.hi >= a.lo) || !std::isfinite(a.lo) || !std::isfinite(a.hi))
      throw ConfigError("stability search: box bounds must be finite with lo <= hi");

  const std::size_t n = static_cast<std::size_t>(opt.samples);
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  // Latin hypercube: one shuffled stratum index per free axis.
  std::vector<std::vector<std::uint32_t>> strata(kDims);
  std::vector<std::vector<float>> jitter(kDims);
  for (std::size_t d = 0; d < kDims; ++d) {
    if (axes[d].width() == 0.0) continue;
    strata[d].resize(n);
    std::iota(strata[d].begin(), strata[d].end(), 0u);
    std::shuffle(strata[d].begin(), strata[d].end(), rng);
    jitter[d].resize(n);
    for (auto& j : jitter[d]) j = static_cast<float>(unif(rng));
  }
  auto sample = [&](std::size_t i) {
    Point p{};
    for (std::size_t d = 0; d < kDims; ++d) {
      if (axes[d].width() == 0.0) {
        p[d] = axes[d].lo;
      } else {
        const double u = (strata[d][i] + static_cast<double>(jitter[d][i])) / static_cast<double>(n);
        p[d] = axes[d].lo + std::min(u, 1.0) * axes[d].width();
      }
    }
    // Angles are periodic; keep the half-open range.
    return p;
  };

  std::vector<double> values(n);
  auto eval_range = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) values[i] = safe_excess(to_query(sample(i), box.beta0_scale));
  };
  const int nt = std::max(1, opt.threads);
  if (nt == 1) {
    eval_range(0, n);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + nt - 1) / nt;
    for (int t = 0; t < nt; ++t) {
      const std::size_t lo = std::min(n, t * chunk), hi = std::min(n, lo + chunk);
      pool.emplace_back(eval_range, lo, hi);
    }
  }

  SearchResult res;
  res.samples = opt.samples;
  res.seed = opt.seed;
  res.max_value = -std::numeric_limits<double>::infinity();
  for (double v : values)
    if (v == -std::numeric_limits<double>::infinity()) ++res.singular;

  // Best samples by value, ties to the lowest index.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t n_starts = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, opt.refine_starts)));
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_starts), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      return values[a] != values[b] ? values[a] > values[b] : a < b;
                    });

  Point best_point = sample(order[0]);
  res.max_value = values[order[0]];

  // Compass search in box-normalised coordinates.
  for (std::size_t s = 0; s < n_starts; ++s) {
    Point p = sample(order[s]);
    double fp = values[order[s]];
    if (fp == -std::numeric_limits<double>::infinity()) continue;
    double step = 0.05;
    for (int it = 0; it < opt.refine_iterations && step > 1e-10; ++it) {
      bool improved = false;
      for (std::size_t d = 0; d < kDims && !improved; ++d) {
        if (axes[d].width() == 0.0) continue;
        for (double sgn : {1.0, -1.0}) {
          Point t = p;
          t[d] = std::clamp(p[d] + sgn * step * axes[d].width(), axes[d].lo, axes[d].hi);
          if (t[d] == p[d]) continue;
          const double ft = safe_excess(to_query(t, box.beta0_scale));
          if (ft > fp) {
            p = t;
            fp = ft;
            improved = true;
            break;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    if (fp > res.max_value) {
      res.max_value = fp;
      best_point = p;
    }
  }
  res.argmax = to_query(best_point, box.beta0_scale);
  return res;
}

void write_search_csv_header(std::ostream& os) {
  os << "rho,max_value,z1,z2,h,k,y,v,kappa,theta,r,mu,samples,seed\n";
}

void write_search_csv_row(std::ostream& os, const SearchResult& r) {
  const auto& q = r.argmax;
  os.precision(17);
  os << q.rho << ',' << r.max_value << ',' << q.z1 << ',' << q.z2 << ',' << q.h << ',' << q.k << ','
     << q.y << ',' << q.v << ',' << q.kappa << ',' << q.theta << ',' << q.r << ',' << q.mu << ','
     << r.samples << ',' << r.seed << '\n';
}

}  // namespace hoc
