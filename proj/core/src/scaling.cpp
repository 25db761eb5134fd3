#include "condlab/scaling.hpp"

#include <cmath>

#include "condlab/errors.hpp"

namespace condlab {

ScalingConfig from_exponents(std::size_t m, double gamma1, double gamma2) {
  if (m < 2) throw Error("from_exponents: width m must be at least 2");
  ScalingConfig cfg;
  cfg.m = m;
  cfg.gamma1 = gamma1;
  cfg.gamma2 = gamma2;
  cfg.gamma = gamma1 + gamma2;
  cfg.gamma_prime = gamma1 - gamma2;
  const double md = static_cast<double>(m);
  cfg.nu = std::pow(md, -gamma1);
  cfg.eps = std::pow(md, -gamma2);
  cfg.kappa = cfg.nu * cfg.eps;
  cfg.kappa_prime = cfg.nu / cfg.eps;
  return cfg;
}

ScalingConfig from_scales(std::size_t m, double nu, double eps) {
  if (m < 2) throw Error("from_scales: width m must be at least 2");
  if (!(nu > 0.0) || !(eps > 0.0))
    throw Error("from_scales: nu and eps must be positive");
  ScalingConfig cfg;
  cfg.m = m;
  cfg.nu = nu;
  cfg.eps = eps;
  cfg.kappa = nu * eps;
  cfg.kappa_prime = nu / eps;
  const double lm = std::log(static_cast<double>(m));
  cfg.gamma1 = -std::log(nu) / lm;
  cfg.gamma2 = -std::log(eps) / lm;
  cfg.gamma = cfg.gamma1 + cfg.gamma2;
  cfg.gamma_prime = cfg.gamma1 - cfg.gamma2;
  return cfg;
}

SchemeName scheme_from_name(const std::string& name) {
  if (name == "lecun") return SchemeName::LeCun;
  if (name == "he") return SchemeName::He;
  if (name == "xavier") return SchemeName::Xavier;
  if (name == "huang") return SchemeName::Huang;
  throw UnknownScheme("unknown scheme '" + name +
                      "'; expected lecun, he, xavier, or huang");
}

std::string to_string(SchemeName scheme) {
  switch (scheme) {
    case SchemeName::LeCun: return "lecun";
    case SchemeName::He: return "he";
    case SchemeName::Xavier: return "xavier";
    case SchemeName::Huang: return "huang";
  }
  throw Error("to_string: invalid scheme value");
}

ScalingConfig named_scheme(SchemeName scheme, std::size_t m, std::size_t d) {
  if (m < 2) throw Error("named_scheme: width m must be at least 2");
  if (d == 0) throw Error("named_scheme: input dimension d must be positive");
  const double md = static_cast<double>(m);
  const double dd = static_cast<double>(d);
  double nu = 0.0;
  double eps = 0.0;
  double ag = 0.0;   // asymptotic gamma
  double agp = 0.0;  // asymptotic gamma'
  switch (scheme) {
    case SchemeName::LeCun:
      nu = std::sqrt(1.0 / md);
      eps = std::sqrt(1.0 / dd);
      ag = 0.5;
      agp = 0.5;
      break;
    case SchemeName::He:
      nu = std::sqrt(2.0 / md);
      eps = std::sqrt(2.0 / dd);
      ag = 0.5;
      agp = 0.5;
      break;
    case SchemeName::Xavier:
      nu = std::sqrt(2.0 / (md + 1.0));
      eps = std::sqrt(2.0 / (md + dd));
      ag = 1.0;
      agp = 0.0;
      break;
    case SchemeName::Huang:
      nu = 1.0;
      eps = std::sqrt(1.0 / md);
      ag = 0.5;
      agp = -0.5;
      break;
  }
  ScalingConfig cfg = from_scales(m, nu, eps);
  cfg.has_asymptotic = true;
  cfg.asymptotic_gamma = ag;
  cfg.asymptotic_gamma_prime = agp;
  return cfg;
}

ScalingConfig named_scheme(const std::string& name, std::size_t m, std::size_t d) {
  return named_scheme(scheme_from_name(name), m, d);
}

std::string to_string(RegimeLabel label) {
  switch (label) {
    case RegimeLabel::LinearThetaLazy: return "linear_theta_lazy";
    case RegimeLabel::LinearWLazy: return "linear_w_lazy";
    case RegimeLabel::CondensedWLag: return "condensed_w_lag";
    case RegimeLabel::CondensedALag: return "condensed_a_lag";
    case RegimeLabel::Critical: return "critical";
    case RegimeLabel::Unclassified: return "unclassified";
  }
  throw Error("to_string: invalid regime label");
}

RegimeLabel classify_regime(double gamma, double gamma_prime) {
  constexpr double tol = 1e-12;
  const double rel = gamma_prime - (gamma - 1.0);  // distance above the critical line
  if (gamma >= 1.0 - tol && std::fabs(rel) <= tol) return RegimeLabel::Critical;
  if (gamma < 1.0 - tol) return RegimeLabel::LinearThetaLazy;
  if (rel > tol) return RegimeLabel::LinearWLazy;
  if (gamma > 1.0 + tol && gamma_prime >= -tol && rel < -tol)
    return RegimeLabel::CondensedWLag;
  if (gamma > 1.0 + tol && gamma_prime < -tol) return RegimeLabel::CondensedALag;
  return RegimeLabel::Unclassified;
}

}  // namespace condlab
