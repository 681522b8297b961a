#include "hoc/stencil.hpp"

#include <cmath>
#include <ostream>

#include "hoc/error.hpp"

namespace hoc {

PdeCoefficients PdeCoefficients::from(const ModelParams& p) {
  const auto m = modified_params(p);
  return {p.v, p.r, m.kappa, m.theta, p.rho};
}

EllipticWeightPair elliptic_weights(const PdeCoefficients& c, double y, double h) {
  if (!(y > 0.0)) throw DomainError("elliptic_weights: y must be > 0 (1/y coefficients)");
  if (!(h > 0.0)) throw DomainError("elliptic_weights: h must be > 0");

  const double v = c.v, r = c.r, ka = c.kappa, th = c.theta, rho = c.rho;
  const double v2 = v * v, v3 = v2 * v, v4 = v3 * v;
  const double h2 = h * h;

  EllipticWeightPair w{};
  auto& a = w.alpha;

  a[kC] = ((4.0 * ka * ka + v2) / (12.0 * v) - v * (2.0 * rho * rho - 5.0) / (3.0 * h2)) * y -
          (ka * v2 + 2.0 * ka * ka * th + v2 * r) / (3.0 * v2) +
          (-v4 + ka * ka * th * th - v3 * r * rho + v2 * r * r) / (3.0 * v3 * y);

  // alpha_{1,3}: upper sign -> E, lower sign -> W.
  {
    const double even = (-v / 24.0 + v * (rho * rho - 1.0) / (3.0 * h2)) * y + ka / 12.0 +
                        r / 6.0 - (-2.0 * r * v * rho + ka * th + 2.0 * r * r - v2) / (12.0 * v * y);
    const double odd = (v / 6.0 - ka * rho / 3.0) / h * y - ka * h / 24.0 -
                       (v * r - ka * th * rho) / (3.0 * v * h) -
                       (v2 - ka * th) * h / (24.0 * v * y);
    a[kE] = even + odd;
    a[kW] = even - odd;
  }
  // alpha_{2,4}: upper sign -> N, lower sign -> S. The (r v rho - kappa
  // theta)/(3 v h) term carries the upper sign; only that choice cancels the
  // O(1) u_y residual and matches beta_{2,4}.
  {
    const double even = (-ka * ka / (6.0 * v) + v * (rho * rho - 1.0) / (3.0 * h2)) * y +
                        ka * (v2 + 4.0 * ka * th) / (12.0 * v2) +
                        (2.0 * ka * th + v2) * (v2 - ka * th) / (12.0 * v3 * y);
    const double odd = (ka / 3.0 - rho * v / 6.0) / h * y - ka * ka * h / (12.0 * v) +
                       (r * v * rho - ka * th) / (3.0 * v * h) -
                       ka * (v2 - ka * th) * h / (12.0 * v2 * y);
    a[kN] = even + odd;
    a[kS] = even - odd;
  }
  // alpha_{5,7}: upper sign -> NE, lower sign -> SW.
  {
    const double even = (-ka / 24.0 - v * (rho + 1.0) * (2.0 * rho + 1.0) / (12.0 * h2)) * y +
                        ka * (rho * v + 2.0 * r + th) / (24.0 * v) +
                        (v2 * r + v3 * rho - 2.0 * r * ka * th) / (24.0 * v2 * y);
    const double odd = (2.0 * rho + 1.0) * (2.0 * ka + v) / (24.0 * h) * y -
                       (2.0 * rho + 1.0) * (ka * th + v * r) / (12.0 * v * h);
    a[kNE] = even + odd;
    a[kSW] = even - odd;
  }
  // alpha_{6,8}: upper sign -> NW, lower sign -> SE.
  {
    const double even = (ka / 24.0 - v * (2.0 * rho - 1.0) * (rho - 1.0) / (12.0 * h2)) * y -
                        ka * (rho * v + 2.0 * r + th) / (24.0 * v) -
                        (v2 * r + v3 * rho - 2.0 * r * ka * th) / (24.0 * v2 * y);
    const double odd = (2.0 * rho - 1.0) * (-2.0 * ka + v) / (24.0 * h) * y -
                       (2.0 * rho - 1.0) * (v * r - ka * th) / (12.0 * v * h);
    a[kNW] = even + odd;
    a[kSE] = even - odd;
  }

  auto& g = w.gamma;
  g[kC] = 2.0 / 3.0;
  g[kNE] = g[kSW] = rho / 24.0;
  g[kNW] = g[kSE] = -rho / 24.0;
  {
    const double odd = -h / 24.0 + (r - rho * v) * h / (12.0 * v * y);
    g[kE] = 1.0 / 12.0 + odd;
    g[kW] = 1.0 / 12.0 - odd;
  }
  {
    const double odd = -ka * h / (12.0 * v) - (v2 - ka * th) * h / (12.0 * v2 * y);
    g[kN] = 1.0 / 12.0 + odd;
    g[kS] = 1.0 / 12.0 - odd;
  }
  return w;
}

ParabolicWeightPair parabolic_weights(const PdeCoefficients& c, double y, double h, double k,
                                      double mu) {
  if (!(h > 0.0) || !(k > 0.0)) throw DomainError("parabolic_weights: h and k must be > 0");
  if (y < 0.0) throw DomainError("parabolic_weights: y must be >= 0");
  if (mu < 0.0 || mu > 1.0) throw DomainError("parabolic_weights: mu must lie in [0, 1]");

  const double v = c.v, r = c.r, ka = c.kappa, th = c.theta, rho = c.rho;
  const double v2 = v * v, v3 = v2 * v, v4 = v3 * v;
  const double y2 = y * y;
  const double h2 = h * h, h3 = h2 * h;
  const double ka2 = ka * ka, rho2 = rho * rho;
  const double muk = mu * k;
  const double ek = (1.0 - mu) * k;

  ParabolicWeightPair w{};
  auto& b = w.beta;
  auto& z = w.zeta;

  b[kC] = (((2.0 * y2 - 8.0) * v4 + ((-8.0 * ka - 8.0 * r) * y - 8.0 * rho * r) * v3 +
            (8.0 * ka2 * y2 + 8.0 * r * r) * v2 - 16.0 * ka2 * th * v * y +
            8.0 * ka2 * th * th) * muk +
           16.0 * v3 * y) * h2 +
          (-16.0 * rho2 + 40.0) * y2 * v4 * muk;

  // beta_{1,3}
  {
    const double odd3 = ((ka * th * v2 - v4 - ka * y * v3) * muk - (y + 2.0 * rho) * v3 +
                         2.0 * v2 * r) * h3;
    const double even2 = (((-y2 + 2.0) * v4 + ((4.0 * r + 2.0 * ka) * y + 4.0 * rho * r) * v3 -
                           (2.0 * ka * th + 4.0 * r * r) * v2) * muk +
                          2.0 * v3 * y) * h2;
    const double odd1 =
        (4.0 * v4 * y2 + (-8.0 * y2 * ka * rho - 8.0 * y * r) * v3 + 8.0 * y * ka * th * rho * v2) *
        muk * h;
    const double even0 = (8.0 * rho2 - 8.0) * y2 * v4 * muk;
    b[kE] = odd3 + even2 + odd1 + even0;
    b[kW] = -odd3 + even2 - odd1 + even0;
  }
  // beta_{2,4}
  {
    const double odd3 = ((2.0 * ka2 * th * v - 2.0 * ka2 * v2 * y - 2.0 * v3 * ka) * muk -
                         2.0 * v2 * y * ka + 2.0 * v * ka * th - 2.0 * v3) * h3;
    const double even2 = ((2.0 * v4 + 2.0 * ka * y * v3 + (-4.0 * ka2 * y2 + 2.0 * ka * th) * v2 +
                           8.0 * ka2 * th * v * y - 4.0 * ka2 * th * th) * muk +
                          2.0 * v3 * y) * h2;
    const double odd1 =
        ((8.0 * y2 * ka + 8.0 * y * rho * r) * v3 - 4.0 * v4 * y2 * rho - 8.0 * v2 * y * ka * th) *
        muk * h;
    const double even0 = (8.0 * rho2 - 8.0) * y2 * v4 * muk;
    b[kN] = odd3 + even2 + odd1 + even0;
    b[kS] = -odd3 + even2 - odd1 + even0;
  }
  // beta_{5,7}
  {
    const double even2 = ((v4 * rho + (-y2 * ka + ka * y * rho + r) * v3 +
                           (th + 2.0 * r) * ka * y * v2 - 2.0 * r * ka * th * v) * muk +
                          v3 * rho * y) * h2;
    const double odd1 = ((2.0 * rho + 1.0) * y2 * v4 +
                         ((2.0 + 4.0 * rho) * ka * y2 + (-4.0 * rho * r - 2.0 * r) * y) * v3 +
                         (-2.0 * th - 4.0 * th * rho) * ka * y * v2) * muk * h;
    const double even0 = (-2.0 - 4.0 * rho2 - 6.0 * rho) * y2 * v4 * muk;
    b[kNE] = even2 + odd1 + even0;
    b[kSW] = even2 - odd1 + even0;
  }
  // beta_{6,8}
  {
    const double even2 = ((-v4 * rho + (y2 * ka - ka * y * rho - r) * v3 +
                           (-th - 2.0 * r) * ka * y * v2 + 2.0 * r * ka * th * v) * muk -
                          v3 * rho * y) * h2;
    const double odd1 = ((2.0 * rho - 1.0) * y2 * v4 +
                         ((2.0 - 4.0 * rho) * ka * y2 + (2.0 * r - 4.0 * rho * r) * y) * v3 +
                         (4.0 * th * rho - 2.0 * th) * ka * y * v2) * muk * h;
    const double even0 = (-4.0 * rho2 + 6.0 * rho - 2.0) * y2 * v4 * muk;
    b[kNW] = even2 + odd1 + even0;
    b[kSE] = even2 - odd1 + even0;
  }

  z[kC] = 16.0 * v3 * y * h2 +
          ek * ((((8.0 - 2.0 * y2) * v4 + ((8.0 * ka + 8.0 * r) * y + 8.0 * rho * r) * v3 +
                  (-8.0 * r * r - 8.0 * ka2 * y2) * v2 + 16.0 * ka2 * th * v * y -
                  8.0 * ka2 * th * th) * h2) +
                (-40.0 + 16.0 * rho2) * y2 * v4);

  // zeta_{1,3}
  {
    const double odd = (2.0 * r - (y + 2.0 * rho) * v) * v2 * h3 +
                       ek * ((v * ka * y + v2 - ka * th) * v2 * h3 +
                             ((-4.0 * v + 8.0 * ka * rho) * v3 * y2 +
                              (-8.0 * ka * th * rho + 8.0 * v * r) * v2 * y) * h);
    const double even = 2.0 * v3 * y * h2 +
                        ek * ((v2 * y2 - (4.0 * r + 2.0 * ka) * v * y + 4.0 * r * r +
                               2.0 * ka * th - 2.0 * v2 - 4.0 * rho * v * r) * v2 * h2 +
                              (8.0 * v2 - 8.0 * v2 * rho2) * v2 * y2);
    z[kE] = even + odd;
    z[kW] = even - odd;
  }
  // zeta_{2,4}
  {
    const double odd = (2.0 * v * ka * th - 2.0 * v2 * y * ka - 2.0 * v3) * h3 +
                       ek * (2.0 * (v3 * ka - ka2 * th * v + ka2 * v2 * y) * h3 +
                             ((-8.0 * v3 * ka + 4.0 * v4 * rho) * y2 +
                              (8.0 * ka * th * v2 - 8.0 * v3 * rho * r) * y) * h);
    const double even = 2.0 * v3 * y * h2 +
                        ek * ((4.0 * ka2 * v2 * y2 - (2.0 * v2 + 8.0 * ka * th) * ka * v * y +
                               2.0 * ka * th * (2.0 * ka * th - v2) - 2.0 * v4) * h2 +
                              (-8.0 * v4 * rho2 + 8.0 * v4) * y2);
    z[kN] = even + odd;
    z[kS] = even - odd;
  }
  // zeta_{5,7}
  {
    const double even = v3 * rho * y * h2 +
                        ek * ((v3 * y2 * ka - v * (v * ka * th + 2.0 * r * ka * v + ka * v2 * rho) * y -
                               v * (v2 * r - 2.0 * r * ka * th + v3 * rho)) * h2 +
                              v * (2.0 * v3 + 6.0 * v3 * rho + 4.0 * v3 * rho2) * y2);
    const double odd =
        ek * ((-v * (2.0 * v3 * rho + v3 + 4.0 * ka * v2 * rho + 2.0 * v2 * ka) * y2 +
               v * (2.0 * v * ka * th + 4.0 * v * ka * th * rho + 4.0 * v2 * rho * r + 2.0 * v2 * r) *
                   y) * h);
    z[kNE] = even + odd;
    z[kSW] = even - odd;
  }
  // zeta_{6,8}
  {
    const double even = -v3 * rho * y * h2 +
                        ek * ((-v3 * y2 * ka + v * (v * ka * th + 2.0 * r * ka * v + ka * v2 * rho) * y +
                               v * (v2 * r - 2.0 * r * ka * th + v3 * rho)) * h2 +
                              v * (2.0 * v3 - 6.0 * v3 * rho + 4.0 * v3 * rho2) * y2);
    const double odd =
        ek * ((v * (-2.0 * v3 * rho + v3 + 4.0 * ka * v2 * rho - 2.0 * v2 * ka) * y2 +
               v * (2.0 * v * ka * th - 4.0 * v * ka * th * rho + 4.0 * v2 * rho * r - 2.0 * v2 * r) *
                   y) * h);
    z[kNW] = even + odd;
    z[kSE] = even - odd;
  }
  return w;
}

Weights9 central_weights(const PdeCoefficients& c, double y, double h) {
  if (!(y > 0.0)) throw DomainError("central_weights: y must be > 0");
  if (!(h > 0.0)) throw DomainError("central_weights: h must be > 0");
  const double diff = 0.5 * c.v * y / (h * h);
  const double cx = (0.5 * c.v * y - c.r) / (2.0 * h);
  const double cy = -c.kappa * (c.theta - c.v * y) / c.v / (2.0 * h);
  const double cross = c.rho * c.v * y / (4.0 * h * h);

  Weights9 w{};
  w[kC] = 4.0 * diff;
  w[kE] = -diff + cx;
  w[kW] = -diff - cx;
  w[kN] = -diff + cy;
  w[kS] = -diff - cy;
  // -rho v y dx dy with dx dy u = (u_NE - u_NW + u_SW - u_SE) / (4 h^2)
  w[kNE] = -cross;
  w[kSW] = -cross;
  w[kNW] = cross;
  w[kSE] = cross;
  return w;
}

ParabolicWeightPair central_parabolic_weights(const PdeCoefficients& c, double y, double h,
                                              double k, double mu) {
  const Weights9 l = central_weights(c, y, h);
  ParabolicWeightPair w{};
  for (std::size_t n = 0; n < 9; ++n) {
    const double id = n == kC ? 1.0 : 0.0;
    w.beta[n] = id + k * mu * l[n];
    w.zeta[n] = id - k * (1.0 - mu) * l[n];
  }
  return w;
}

WeightCache::WeightCache(const Grid& grid, const PdeCoefficients& c, double k, double mu,
                         Scheme scheme) {
  rows_.reserve(static_cast<std::size_t>(grid.ny()));
  for (int j = 0; j <= grid.M; ++j) {
    const double y = grid.y(j);
    if (!(y > 0.0)) throw DomainError("WeightCache: grid contains y <= 0");
    rows_.push_back(scheme == Scheme::kHoc ? parabolic_weights(c, y, grid.h(), k, mu)
                                           : central_parabolic_weights(c, y, grid.h(), k, mu));
  }
}

double apply_stencil(const Weights9& w, const Grid& grid, std::span<const double> u, int i,
                     int j) {
  if (u.size() != grid.size()) throw DomainError("apply_stencil: field size mismatch");
  if (!grid.contains(i - 1, j - 1) || !grid.contains(i + 1, j + 1)) {
    throw DomainError("apply_stencil: node is not interior");
  }
  double acc = 0.0;
  for (std::size_t l = 0; l < 9; ++l) {
    const auto [di, dj] = kStencilOffsets[l];
    acc += w[l] * u[grid.flat(i + di, j + dj)];
  }
  return acc;
}

void dump_weights_csv(std::ostream& os, const Grid& grid, const PdeCoefficients& c, double mu) {
  os << "j,y,l,alpha,gamma,beta,zeta\n";
  const auto old_precision = os.precision(17);
  for (int j = 0; j <= grid.M; ++j) {
    const double y = grid.y(j);
    const auto e = elliptic_weights(c, y, grid.h());
    const auto p = parabolic_weights(c, y, grid.h(), grid.k, mu);
    for (std::size_t l = 0; l < 9; ++l) {
      os << j << ',' << y << ',' << l << ',' << e.alpha[l] << ',' << e.gamma[l] << ','
         << p.beta[l] << ',' << p.zeta[l] << '\n';
    }
  }
  os.precision(old_precision);
}

}  // namespace hoc
