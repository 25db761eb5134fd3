#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace condlab {

// Width-dependent prefactors of the two-layer model.  The output layer is
// multiplied by nu and the hidden pre-activation by eps; the products
// kappa = nu * eps and kappa' = nu / eps control which layer moves first.
struct ScalingConfig {
  std::size_t m = 0;    // hidden width
  double nu = 0.0;      // output-layer prefactor
  double eps = 0.0;     // hidden-layer prefactor
  double kappa = 0.0;        // nu * eps
  double kappa_prime = 0.0;  // nu / eps

  // Exponents with nu = m^{-gamma1}, eps = m^{-gamma2} when known exactly.
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double gamma = 0.0;        // gamma1 + gamma2
  double gamma_prime = 0.0;  // gamma1 - gamma2

  // Named schemes have width-dependent exponents; these are their m -> inf
  // limits, used for regime classification.
  bool has_asymptotic = false;
  double asymptotic_gamma = 0.0;
  double asymptotic_gamma_prime = 0.0;

  double classification_gamma() const {
    return has_asymptotic ? asymptotic_gamma : gamma;
  }
  double classification_gamma_prime() const {
    return has_asymptotic ? asymptotic_gamma_prime : gamma_prime;
  }
};

ScalingConfig from_exponents(std::size_t m, double gamma1, double gamma2);
ScalingConfig from_scales(std::size_t m, double nu, double eps);

enum class SchemeName { LeCun, He, Xavier, Huang };

SchemeName scheme_from_name(const std::string& name);
std::string to_string(SchemeName scheme);

// Standard initialization recipes expressed as (nu, eps) prefactors; the
// exact finite-m values are stored and the asymptotic exponents recorded
// for classification.
ScalingConfig named_scheme(SchemeName scheme, std::size_t m, std::size_t d);
ScalingConfig named_scheme(const std::string& name, std::size_t m, std::size_t d);

enum class RegimeLabel {
  LinearThetaLazy,  // gamma < 1: all parameters stay near initialization
  LinearWLazy,      // above the critical line: inner weights stay lazy
  CondensedWLag,    // inner weights condense after the outer layer fits
  CondensedALag,    // outer layer lags; inner weights condense first
  Critical,         // on the boundary gamma >= 1, gamma' = gamma - 1
  Unclassified,     // remaining boundary points with no stated behaviour
};

std::string to_string(RegimeLabel label);

// Phase-diagram lookup in the (gamma, gamma') plane.  Boundary membership is
// decided with an absolute tolerance band of 1e-12.
RegimeLabel classify_regime(double gamma, double gamma_prime);

}  // namespace condlab
