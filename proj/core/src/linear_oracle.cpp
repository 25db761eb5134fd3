#include "condlab/linear_oracle.hpp"

#include <cmath>
#include <limits>

#include "condlab/errors.hpp"

namespace condlab {

LinearSystem make_linear_system(const CondensationDirection& direction) {
  const std::size_t d = direction.z.size();
  LinearSystem sys;
  sys.direction = direction;
  sys.A = SymmetricMatrix(d + 1);
  for (std::size_t j = 0; j < d; ++j) {
    sys.A(0, j + 1) = direction.z[j];
    sys.A(j + 1, 0) = direction.z[j];
  }
  return sys;
}

std::pair<EigenPair, EigenPair> eigenpairs(const LinearSystem& system) {
  const auto& dir = system.direction;
  if (!(dir.z_norm > 0.0)) throw Error("eigenpairs: direction norm must be positive");
  const std::size_t d = dir.z.size();
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  EigenPair plus;
  EigenPair minus;
  plus.value = dir.z_norm;
  minus.value = -dir.z_norm;
  plus.vector.resize(d + 1);
  minus.vector.resize(d + 1);
  plus.vector[0] = inv_sqrt2;
  minus.vector[0] = -inv_sqrt2;
  for (std::size_t j = 0; j < d; ++j) {
    plus.vector[j + 1] = dir.z_hat[j] * inv_sqrt2;
    minus.vector[j + 1] = dir.z_hat[j] * inv_sqrt2;
  }
  return {plus, minus};
}

OriginalScaleState analytic_solution(double a0, std::span<const double> w0,
                                     const ScalingConfig& scaling,
                                     const CondensationDirection& direction,
                                     double t) {
  if (t < 0.0) throw Error("analytic_solution: t must be nonnegative");
  if (w0.size() != direction.z.size())
    throw DimensionMismatch("analytic_solution: w0 dimension " +
                            std::to_string(w0.size()) + " does not match z");
  const double exponent = direction.z_norm * t / 2.0;
  if (exponent > 700.0)
    throw HorizonExceeded("analytic_solution: growth exponent " +
                          std::to_string(exponent) + " exceeds the overflow guard");
  const double r = std::exp(exponent);
  const double r2 = r * r;
  const double c = (r2 + 1.0 / r2) / 2.0;
  const double s = (r2 - 1.0 / r2) / 2.0;

  const double nu = scaling.nu;
  const double eps = scaling.eps;
  const double p0 = dot(w0, direction.z_hat);

  OriginalScaleState out;
  out.nu_a = nu * c * a0 + eps * s * p0;
  out.eps_w.resize(w0.size());
  const double along = nu * s * a0 + eps * c * p0 - eps * p0;
  for (std::size_t j = 0; j < w0.size(); ++j)
    out.eps_w[j] = along * direction.z_hat[j] + eps * w0[j];
  if (!std::isfinite(out.nu_a))
    throw HorizonExceeded("analytic_solution: result overflows double range");
  return out;
}

WDecomposition decompose_w(std::span<const double> w,
                           std::span<const double> z_hat) {
  if (w.size() != z_hat.size())
    throw DimensionMismatch("decompose_w: vector dimensions differ");
  WDecomposition out;
  out.par = dot(w, z_hat);
  out.perp.resize(w.size());
  for (std::size_t j = 0; j < w.size(); ++j)
    out.perp[j] = w[j] - out.par * z_hat[j];
  return out;
}

ResidualTerms residual_terms(const NormalizedParams& params,
                             const ScalingConfig& scaling,
                             const Activation& act, const Dataset& data) {
  const std::size_t m = params.m;
  const std::size_t d = params.d;
  const std::size_t n = data.n();
  const Vec e = residuals(params, scaling, act, data);

  // Signs chosen so the identities
  //   (nu/eps) da_k/dt = w_k.z + f_k,   dw_k/dt = (nu/eps)(a_k z + g_k)
  // hold exactly for the flow's right-hand side.
  ResidualTerms out;
  out.f.assign(m, 0.0);
  out.g = Matrix(m, d);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < m; ++k) {
    const auto wk = params.W.row(k);
    const double ak = params.a[k];
    double fk = 0.0;
    double* gk = &out.g(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto xi = data.input(i);
      const double s = dot(wk, xi);
      double ss = 0.0;
      double d1 = 0.0;
      act.eval_scaled_pair(s, scaling.eps, ss, d1);
      fk += e[i] * ss + data.label(i) * s;
      const double coef = e[i] * ak * d1 + data.label(i) * ak;
      for (std::size_t j = 0; j < d; ++j) gk[j] += coef * xi[j];
    }
    out.f[k] = -fk * inv_n;
    for (std::size_t j = 0; j < d; ++j) gk[j] *= -inv_n;
  }
  return out;
}

NeuronEnergies neuron_energies(const NormalizedParams& params,
                               const ScalingConfig& scaling) {
  const std::size_t m = params.m;
  NeuronEnergies out;
  out.q.resize(m);
  out.p.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const auto wk = params.W.row(k);
    const double scaled_a = scaling.kappa_prime * params.a[k];
    double w2 = 0.0;
    double winf = 0.0;
    for (double v : wk) {
      w2 += v * v;
      winf = std::max(winf, std::fabs(v));
    }
    out.q[k] = std::sqrt(scaled_a * scaled_a + w2);
    out.p[k] = std::max(std::fabs(params.a[k]), winf);
    out.q_max = std::max(out.q_max, out.q[k]);
    out.p_max = std::max(out.p_max, out.p[k]);
  }
  return out;
}

double effective_horizon(std::span<const double> times,
                         std::span<const double> q_max_series, std::size_t m,
                         double gamma, double gamma_prime) {
  if (times.size() != q_max_series.size() || times.empty())
    throw Error("effective_horizon: series must be nonempty and aligned");
  if (classify_regime(gamma, gamma_prime) != RegimeLabel::CondensedWLag)
    throw WrongRegime("effective_horizon: defined only for gamma > 1 with "
                      "0 <= gamma' < gamma - 1");
  const double md = static_cast<double>(m);
  const double tau = (gamma - gamma_prime - 1.0) / 4.0;
  // eps^2 = m^{-(gamma - gamma')} under the symmetric exponent split.
  const double eps2 = std::pow(md, -(gamma - gamma_prime));
  const double threshold = std::pow(md, -tau);
  double phi = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    phi = std::max(phi, q_max_series[i]);
    if (md * eps2 * phi * phi * phi > threshold) return times[i];
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace condlab
