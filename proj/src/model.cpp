#include "hoc/model.hpp"

#include <cmath>
#include <string>

#include "hoc/error.hpp"

namespace hoc {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("invalid model parameter: " + what);
}

}  // namespace

void ModelParams::validate() const {
  require(std::isfinite(r), "r must be finite");
  require(v > 0.0, "v must be > 0");
  require(K > 0.0, "K must be > 0");
  require(T > 0.0, "T must be > 0");
  require(kappa_star > 0.0, "kappa_star must be > 0");
  require(theta_star > 0.0, "theta_star must be > 0");
  require(rho >= -1.0 && rho <= 1.0, "rho must lie in [-1, 1]");
  require(kappa_star + lambda0 > 0.0, "kappa_star + lambda0 must be > 0");
}

ModelParams default_params() { return ModelParams{}; }

ModifiedParams modified_params(const ModelParams& p) {
  const double kappa = p.kappa_star + p.lambda0;
  if (!(kappa > 0.0)) {
    throw ConfigError("modified_params: kappa_star + lambda0 must be > 0");
  }
  return {kappa, p.kappa_star * p.theta_star / kappa};
}

ComputationalPoint to_computational(const ModelParams& p, const FinancialPoint& fp) {
  if (!(fp.S > 0.0)) throw DomainError("to_computational: S must be > 0");
  if (fp.sigma < 0.0) throw DomainError("to_computational: sigma must be >= 0");
  return {std::log(fp.S / p.K), fp.sigma / p.v, p.T - fp.t};
}

FinancialPoint to_financial(const ModelParams& p, const ComputationalPoint& cp) {
  return {p.K * std::exp(cp.x), cp.y * p.v, p.T - cp.t_tilde};
}

double u_to_price(const ModelParams& p, double u, double t_tilde) {
  return p.K * std::exp(-p.r * t_tilde) * u;
}

double price_to_u(const ModelParams& p, double V, double t_tilde) {
  return std::exp(p.r * t_tilde) * V / p.K;
}

double initial_condition(double x) {
  // -expm1(x) keeps the small-|x| branch accurate.
  return x < 0.0 ? -std::expm1(x) : 0.0;
}

double dirichlet_left(const ModelParams& p, double x_left, double t_tilde) {
  return -std::expm1(p.r * t_tilde + x_left);
}

}  // namespace hoc
