#pragma once

// Smooth scalar activations with closed-form first and second derivatives,
// the stabilized sigma(eps*s)/eps evaluation used throughout the flow, and a
// numeric probe for the smallest nonvanishing derivative order at zero.

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "condlab/errors.hpp"

namespace condlab {

enum class ActivationKind { Tanh, ScaledSiLU, XTanh, ModifiedSoftplus, Linear };

namespace detail {
inline double sigmoid(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}
}  // namespace detail

struct Activation {
  ActivationKind kind = ActivationKind::Tanh;

  const char* name() const noexcept {
    switch (kind) {
      case ActivationKind::Tanh: return "tanh";
      case ActivationKind::ScaledSiLU: return "silu2";
      case ActivationKind::XTanh: return "xtanh";
      case ActivationKind::ModifiedSoftplus: return "softplus2";
      case ActivationKind::Linear: return "linear";
    }
    return "?";
  }

  double eval(double x) const noexcept {
    switch (kind) {
      case ActivationKind::Tanh:
        return std::tanh(x);
      case ActivationKind::ScaledSiLU:
        return 2.0 * x * detail::sigmoid(x);
      case ActivationKind::XTanh:
        return x * std::tanh(x);
      case ActivationKind::ModifiedSoftplus:
        // 2*(log(1+e^x) - log 2), evaluated on the overflow-safe branch.
        if (x > 0.0)
          return 2.0 * (x + std::log1p(std::exp(-x)) - 0.6931471805599453);
        return 2.0 * (std::log1p(std::exp(x)) - 0.6931471805599453);
      case ActivationKind::Linear:
        return x;
    }
    return 0.0;
  }

  double eval_d1(double x) const noexcept {
    switch (kind) {
      case ActivationKind::Tanh: {
        const double t = std::tanh(x);
        return 1.0 - t * t;
      }
      case ActivationKind::ScaledSiLU: {
        const double s = detail::sigmoid(x);
        return 2.0 * s * (1.0 + x * (1.0 - s));
      }
      case ActivationKind::XTanh: {
        const double t = std::tanh(x);
        return t + x * (1.0 - t * t);
      }
      case ActivationKind::ModifiedSoftplus:
        return 2.0 * detail::sigmoid(x);
      case ActivationKind::Linear:
        return 1.0;
    }
    return 0.0;
  }

  double eval_d2(double x) const noexcept {
    switch (kind) {
      case ActivationKind::Tanh: {
        const double t = std::tanh(x);
        return -2.0 * t * (1.0 - t * t);
      }
      case ActivationKind::ScaledSiLU: {
        const double s = detail::sigmoid(x);
        return 2.0 * s * (1.0 - s) * (2.0 + x * (1.0 - 2.0 * s));
      }
      case ActivationKind::XTanh: {
        const double t = std::tanh(x);
        return 2.0 * (1.0 - t * t) * (1.0 - x * t);
      }
      case ActivationKind::ModifiedSoftplus: {
        const double s = detail::sigmoid(x);
        return 2.0 * s * (1.0 - s);
      }
      case ActivationKind::Linear:
        return 0.0;
    }
    return 0.0;
  }

  // ss = sigma(eps*s)/eps (stabilized) and d1 = sigma'(eps*s), sharing one
  // transcendental evaluation. This is the flow right-hand side's hot path.
  void eval_scaled_pair(double s, double eps, double& ss, double& d1) const noexcept {
    const double u = eps * s;
    switch (kind) {
      case ActivationKind::Tanh: {
        const double t = std::tanh(u);
        d1 = 1.0 - t * t;
        ss = (std::fabs(u) < 1e-6) ? s : t / eps;
        return;
      }
      case ActivationKind::ScaledSiLU: {
        const double sg = detail::sigmoid(u);
        d1 = 2.0 * sg * (1.0 + u * (1.0 - sg));
        // series: s*d1(0) + (eps*s^2/2)*d2(0) with d1(0)=1, d2(0)=1
        ss = (std::fabs(u) < 1e-6) ? s + 0.5 * eps * s * s : 2.0 * u * sg / eps;
        return;
      }
      case ActivationKind::XTanh: {
        const double t = std::tanh(u);
        d1 = t + u * (1.0 - t * t);
        // d1(0)=0, d2(0)=2
        ss = (std::fabs(u) < 1e-6) ? eps * s * s : u * t / eps;
        return;
      }
      case ActivationKind::ModifiedSoftplus: {
        const double sg = detail::sigmoid(u);
        d1 = 2.0 * sg;
        if (std::fabs(u) < 1e-6) {
          ss = s + 0.25 * eps * s * s;  // d1(0)=1, d2(0)=1/2
        } else {
          ss = eval(u) / eps;
        }
        return;
      }
      case ActivationKind::Linear:
        d1 = 1.0;
        ss = s;
        return;
    }
  }
};

Activation make_activation(ActivationKind kind);
Activation activation_from_name(std::string_view name);  // throws UnknownActivation

// sigma(eps*s)/eps with a second-order series fallback for |eps*s| < 1e-6,
// where the direct quotient would lose most of its digits. For the linear
// activation the quotient is the identity, returned exactly.
double scaled_sigma(const Activation& act, double s, double eps);

// Smallest p in [1, max_p] with sigma^(p)(0) != 0 (|.| > tol), estimated by
// Richardson-extrapolated central differences. Throws NoMultiplicity when
// every order up to max_p vanishes.
int multiplicity(const Activation& act, int max_p = 4, double tol = 1e-6);

enum class ActivationAssumption { Multiplicity1, NTKStyle };

struct ActivationCheck {
  bool pass = false;
  double sup_d1 = 0.0;   // sup |sigma'| on the sampling window
  double sup_d2 = 0.0;   // sup |sigma''|
  double tail_neg = 0.0; // sigma'(-40)
  double tail_pos = 0.0; // sigma'(+40)
  std::vector<std::string> findings;  // empty iff pass
};

// Multiplicity1: sigma(0)=0, sigma'(0)=1, bounded first/second derivatives.
// NTKStyle: bounded derivatives and distinct sigma' limits at -inf / +inf.
ActivationCheck check_assumption(const Activation& act, ActivationAssumption which);

}  // namespace condlab
