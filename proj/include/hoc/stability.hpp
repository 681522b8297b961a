#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

namespace hoc {

/// Frozen-coefficient von Neumann query for the parabolic HOC scheme.
struct AmplificationQuery {
  double z1 = 0.0;
  double z2 = 0.0;
  double h = 0.1;
  double k = 0.01;
  double y = 1.0;
  double v = 0.1;
  double kappa = 2.0;
  double theta = 0.1;
  double rho = 0.0;
  double r = 0.0;
  double mu = 0.5;
  /// Test hook: beta_0 is multiplied by this factor before evaluation.
  double beta0_scale = 1.0;
};

struct TrigVars {
  double c1, c2, s1, s2;
  double W;  // 2 (theta - v y) s2 / v
  double V;  // 2 v y s1 / kappa
};

TrigVars trig_vars(const AmplificationQuery& q);

/// G = sum zeta_l e^{i(di z1 + dj z2)} / sum beta_l e^{i(di z1 + dj z2)}.
/// Throws NumericalError when the denominator vanishes.
std::complex<double> amplification_factor(const AmplificationQuery& q);

/// |G|^2 - 1 evaluated as Re((n - d) conj(n + d)) / |d|^2 so that values
/// near zero keep their absolute accuracy.
double amplification_excess(const AmplificationQuery& q);

using FValues = std::array<double, 7>;  // f1..f7 at index 0..6

FValues f_functions(double c1, double c2);

struct ClosedFormTerms {
  double n4, n2, d6, d4, d2, d0;
  double numerator;    // -8 k h^2 (n4 h^2 + n2)
  double denominator;  // d6 h^6 + d4 h^4 + d2 h^2 + d0
  double value;
};

/// The rho = r = 0, mu = 1/2 closed form, evaluated from the printed
/// polynomials. Throws DomainError outside those preconditions and
/// NumericalError when the denominator is not positive.
ClosedFormTerms closed_form_criterion(const AmplificationQuery& q);

/// d22 as a quadratic in W: V^2 kappa^4 s1^2 (V^2 f6 - 36 V c1 c2 W + 4 f5 W^2).
double d22(double c1, double c2, double s1, double V, double W, double kappa);

/// The printed minimum of d22 over W: 2 V^4 kappa^4 s1^2 f1 f7 / f5.
double d22_printed_minimum(double c1, double c2, double s1, double V, double kappa);

struct Interval {
  double lo;
  double hi;
  double width() const { return hi - lo; }
};

struct SearchBox {
  Interval h{1e-3, 1.0};
  Interval k{1e-6, 1.0};
  Interval y{0.0, 20.0};
  Interval v{0.01, 1.0};
  Interval kappa{0.1, 5.0};
  Interval theta{0.01, 1.0};
  Interval rho{0.0, 0.0};
  Interval r{0.0, 0.0};
  Interval mu{0.5, 0.5};
  Interval z1{0.0, 6.283185307179586};
  Interval z2{0.0, 6.283185307179586};
  double beta0_scale = 1.0;
};

struct SearchOptions {
  std::int64_t samples = 1'000'000;
  std::uint64_t seed = 1;
  int refine_starts = 8;      // best samples used as pattern-search seeds
  int refine_iterations = 400;
  int threads = 1;
};

struct SearchResult {
  double max_value = 0.0;
  AmplificationQuery argmax;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
  std::int64_t singular = 0;  // samples skipped because sum beta e^{...} vanished
};

/// Latin-hypercube sampling of the box followed by compass search from the
/// best samples. Deterministic for fixed (box, options) regardless of threads.
SearchResult stability_search(const SearchBox& box, const SearchOptions& opt);

void write_search_csv_header(std::ostream& os);
void write_search_csv_row(std::ostream& os, const SearchResult& r);

}  // namespace hoc
