#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "hoc/grid.hpp"
#include "hoc/model.hpp"

namespace hoc {

/// Node numbering of the compact 3x3 stencil:
///
///   6 2 5
///   3 0 1
///   7 4 8
enum StencilNode : int { kC = 0, kE = 1, kN = 2, kW = 3, kS = 4, kNE = 5, kNW = 6, kSW = 7, kSE = 8 };

/// (di, dj) offset of each stencil node.
inline constexpr std::array<std::pair<int, int>, 9> kStencilOffsets{{
    {0, 0}, {1, 0}, {0, 1}, {-1, 0}, {0, -1}, {1, 1}, {-1, 1}, {-1, -1}, {1, -1}}};

using Weights9 = std::array<double, 9>;

/// Constant coefficients of the transformed operator (kappa, theta already
/// include the risk premium).
struct PdeCoefficients {
  double v;
  double r;
  double kappa;
  double theta;
  double rho;

  static PdeCoefficients from(const ModelParams& p);
};

/// sum alpha_l u_l = sum gamma_l f_l approximates L u = f to O(h^4).
struct EllipticWeightPair {
  Weights9 alpha;
  Weights9 gamma;
};

/// sum beta_l u_l^{n+1} = sum zeta_l u_l^n, the fully discrete scheme
/// scaled by 24 v^3 h^2 y k.
struct ParabolicWeightPair {
  Weights9 beta;
  Weights9 zeta;
};

EllipticWeightPair elliptic_weights(const PdeCoefficients& c, double y, double h);

/// beta/zeta as polynomials in (y, h, k, mu). These are finite at y = 0.
ParabolicWeightPair parabolic_weights(const PdeCoefficients& c, double y, double h, double k,
                                      double mu);

/// Second-order central discretisation of L (no truncation-error correction).
Weights9 central_weights(const PdeCoefficients& c, double y, double h);

/// Theta-scheme for the central operator: (u^{n+1} - u^n)/k + L_h(mu u^{n+1}
/// + (1 - mu) u^n) = 0, written as beta u^{n+1} = zeta u^n.
ParabolicWeightPair central_parabolic_weights(const PdeCoefficients& c, double y, double h,
                                              double k, double mu);

enum class Scheme { kHoc, kCentral };

/// One weight pair per grid row j; weights depend on y only.
class WeightCache {
 public:
  WeightCache(const Grid& grid, const PdeCoefficients& c, double k, double mu, Scheme scheme);

  const ParabolicWeightPair& at(int j) const { return rows_.at(static_cast<std::size_t>(j)); }
  std::size_t size() const { return rows_.size(); }

 private:
  std::vector<ParabolicWeightPair> rows_;
};

/// sum_l w[l] * u(i + di_l, j + dj_l) on a flat field laid out as in Grid.
double apply_stencil(const Weights9& w, const Grid& grid, std::span<const double> u, int i,
                     int j);

/// CSV with columns j,y,l,alpha,gamma,beta,zeta for every grid row.
void dump_weights_csv(std::ostream& os, const Grid& grid, const PdeCoefficients& c, double mu);

}  // namespace hoc
