#pragma once

// Manufactured solution u = sin(2x) cos(3y) + x^2 y and its image under the
// transformed operator, for truncation-order checks of the stencils.

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "hoc/harness.hpp"
#include "hoc/stencil.hpp"

namespace mms {

inline double u(double x, double y) { return std::sin(2 * x) * std::cos(3 * y) + x * x * y; }

inline double f(const hoc::PdeCoefficients& c, double x, double y) {
  const double s2 = std::sin(2 * x), c2 = std::cos(2 * x), s3 = std::sin(3 * y), c3 = std::cos(3 * y);
  const double ux = 2 * c2 * c3 + 2 * x * y;
  const double uxx = -4 * s2 * c3 + 2 * y;
  const double uy = -3 * s2 * s3 + x * x;
  const double uyy = -9 * s2 * c3;
  const double uxy = -6 * c2 * s3 + 2 * x;
  const double vy = c.v * y;
  return -0.5 * vy * (uxx + uyy) - c.rho * vy * uxy + (0.5 * vy - c.r) * ux -
         c.kappa * (c.theta - vy) / c.v * uy;
}

inline double hoc_residual(const hoc::PdeCoefficients& c, double x, double y, double h) {
  const auto w = hoc::elliptic_weights(c, y, h);
  double lhs = 0, rhs = 0;
  for (std::size_t l = 0; l < 9; ++l) {
    const auto [di, dj] = hoc::kStencilOffsets[l];
    lhs += w.alpha[l] * u(x + di * h, y + dj * h);
    rhs += w.gamma[l] * f(c, x + di * h, y + dj * h);
  }
  return lhs - rhs;
}

inline double central_residual(const hoc::PdeCoefficients& c, double x, double y, double h) {
  const auto w = hoc::central_weights(c, y, h);
  double lhs = 0;
  for (std::size_t l = 0; l < 9; ++l) {
    const auto [di, dj] = hoc::kStencilOffsets[l];
    lhs += w[l] * u(x + di * h, y + dj * h);
  }
  return lhs - f(c, x, y);
}

inline const std::vector<std::pair<double, double>>& sample_points() {
  static const std::vector<std::pair<double, double>> pts{{0.3, 1.2}, {-0.7, 2.5}, {1.1, 0.8}, {0.05, 4.0}};
  return pts;
}

/// Fitted slope of max |residual| over the sample points against h.
template <class Residual>
double slope(const hoc::PdeCoefficients& c, Residual res,
             const std::vector<double>& hs = {0.2, 0.1, 0.05, 0.025}) {
  std::vector<std::pair<double, double>> rec;
  for (double h : hs) {
    double m = 0;
    for (auto [x, y] : sample_points()) m = std::max(m, std::abs(res(c, x, y, h)));
    rec.emplace_back(h, m);
  }
  return hoc::fit_slope(rec).m;
}

}  // namespace mms
