#include "condlab/activation.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace condlab {

Activation make_activation(ActivationKind kind) { return Activation{kind}; }

Activation activation_from_name(std::string_view name) {
  if (name == "tanh") return Activation{ActivationKind::Tanh};
  if (name == "silu2") return Activation{ActivationKind::ScaledSiLU};
  if (name == "xtanh") return Activation{ActivationKind::XTanh};
  if (name == "softplus2") return Activation{ActivationKind::ModifiedSoftplus};
  if (name == "linear") return Activation{ActivationKind::Linear};
  throw UnknownActivation("unknown activation name: '" + std::string(name) +
                          "' (expected tanh|silu2|xtanh|softplus2|linear)");
}

double scaled_sigma(const Activation& act, double s, double eps) {
  if (act.kind == ActivationKind::Linear) return s;  // eps cancels exactly
  const double u = eps * s;
  if (std::fabs(u) < 1e-6)
    return s * act.eval_d1(0.0) + 0.5 * eps * s * s * act.eval_d2(0.0);
  return act.eval(u) / eps;
}

namespace {

// Central differences for sigma^(order)(0); error expands in even powers of h,
// which the Richardson tableau below exploits.
double central_difference(const Activation& act, int order, double h) {
  switch (order) {
    case 1:
      return (act.eval(h) - act.eval(-h)) / (2.0 * h);
    case 2:
      return (act.eval(h) - 2.0 * act.eval(0.0) + act.eval(-h)) / (h * h);
    case 3:
      return (act.eval(2.0 * h) - 2.0 * act.eval(h) + 2.0 * act.eval(-h) -
              act.eval(-2.0 * h)) /
             (2.0 * h * h * h);
    case 4:
      return (act.eval(2.0 * h) - 4.0 * act.eval(h) + 6.0 * act.eval(0.0) -
              4.0 * act.eval(-h) + act.eval(-2.0 * h)) /
             (h * h * h * h);
    default:
      throw Error("central_difference: order must be in [1, 4]");
  }
}

double derivative_at_zero(const Activation& act, int order) {
  constexpr int kLevels = 6;
  std::array<std::array<double, kLevels>, kLevels> tab{};
  double h = 0.5;
  double best = 0.0;
  double best_err = std::numeric_limits<double>::infinity();
  for (int j = 0; j < kLevels; ++j, h *= 0.5) {
    tab[j][0] = central_difference(act, order, h);
    double p4 = 4.0;
    for (int k = 1; k <= j; ++k, p4 *= 4.0) {
      tab[j][k] = (p4 * tab[j][k - 1] - tab[j - 1][k - 1]) / (p4 - 1.0);
    }
    if (j > 0) {
      // Successive-diagonal difference doubles as the error estimate; keep the
      // level where it bottoms out, before rounding noise takes over.
      const double err = std::fabs(tab[j][j] - tab[j - 1][j - 1]);
      if (err <= best_err) {
        best_err = err;
        best = tab[j][j];
      }
    } else {
      best = tab[0][0];
    }
  }
  return best;
}

}  // namespace

int multiplicity(const Activation& act, int max_p, double tol) {
  if (max_p < 1 || max_p > 4)
    throw Error("multiplicity: max_p must be in [1, 4]");
  for (int p = 1; p <= max_p; ++p) {
    if (std::fabs(derivative_at_zero(act, p)) > tol) return p;
  }
  throw NoMultiplicity("multiplicity: derivatives at zero vanish up to order " +
                       std::to_string(max_p));
}

ActivationCheck check_assumption(const Activation& act,
                                 ActivationAssumption which) {
  ActivationCheck rep;

  constexpr int kGrid = 2001;
  constexpr double kHalfWidth = 50.0;
  bool finite = true;
  for (int i = 0; i < kGrid; ++i) {
    const double x = -kHalfWidth + 2.0 * kHalfWidth * i / (kGrid - 1);
    const double d1 = std::fabs(act.eval_d1(x));
    const double d2 = std::fabs(act.eval_d2(x));
    if (!std::isfinite(d1) || !std::isfinite(d2)) finite = false;
    if (d1 > rep.sup_d1) rep.sup_d1 = d1;
    if (d2 > rep.sup_d2) rep.sup_d2 = d2;
  }
  rep.tail_neg = act.eval_d1(-40.0);
  rep.tail_pos = act.eval_d1(40.0);

  if (!finite)
    rep.findings.push_back("derivatives are not finite on the sampling window");

  if (which == ActivationAssumption::Multiplicity1) {
    if (std::fabs(act.eval(0.0)) > 1e-12)
      rep.findings.push_back("sigma(0) is not zero");
    if (std::fabs(act.eval_d1(0.0) - 1.0) > 1e-12)
      rep.findings.push_back("sigma'(0) is not one");
    try {
      if (multiplicity(act, 4, 1e-6) != 1)
        rep.findings.push_back("smallest nonvanishing derivative order at zero exceeds one");
    } catch (const NoMultiplicity&) {
      rep.findings.push_back("no nonvanishing derivative at zero up to order four");
    }
  } else {  // NTKStyle
    // sigma' must approach genuine, distinct limits on both sides.
    if (std::fabs(act.eval_d1(-40.0) - act.eval_d1(-50.0)) > 1e-10)
      rep.findings.push_back("sigma' has not settled at the negative tail");
    if (std::fabs(act.eval_d1(40.0) - act.eval_d1(50.0)) > 1e-10)
      rep.findings.push_back("sigma' has not settled at the positive tail");
    if (std::fabs(rep.tail_pos - rep.tail_neg) <= 1e-6)
      rep.findings.push_back("sigma' tail limits coincide");
  }

  rep.pass = rep.findings.empty();
  return rep;
}

}  // namespace condlab
