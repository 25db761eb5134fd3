#include "condlab/gram.hpp"

#include <cmath>
#include <limits>

#include "condlab/errors.hpp"
#include "condlab/rng.hpp"

namespace condlab {

SymmetricMatrix gram_a(const NormalizedParams& params,
                       const ScalingConfig& scaling, const Activation& act,
                       const Dataset& data) {
  const std::size_t n = data.n();
  const std::size_t m = params.m;
  SymmetricMatrix g(n);
  Vec ss(n);
  for (std::size_t k = 0; k < m; ++k) {
    const auto wk = params.W.row(k);
    for (std::size_t i = 0; i < n; ++i)
      ss[i] = scaled_sigma(act, dot(wk, data.input(i)), scaling.eps);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) g(i, j) += ss[i] * ss[j];
  }
  const double scale =
      scaling.nu * scaling.eps * scaling.eps * scaling.eps / static_cast<double>(m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) g(i, j) *= scale;
  g.symmetrize();
  return g;
}

SymmetricMatrix gram_w(const NormalizedParams& params,
                       const ScalingConfig& scaling, const Activation& act,
                       const Dataset& data) {
  const std::size_t n = data.n();
  const std::size_t m = params.m;
  SymmetricMatrix g(n);
  Vec d1(n);
  for (std::size_t k = 0; k < m; ++k) {
    const auto wk = params.W.row(k);
    const double ak2 = params.a[k] * params.a[k];
    for (std::size_t i = 0; i < n; ++i)
      d1[i] = act.eval_d1(scaling.eps * dot(wk, data.input(i)));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) g(i, j) += ak2 * d1[i] * d1[j];
  }
  const double scale =
      scaling.nu * scaling.nu * scaling.nu * scaling.eps / static_cast<double>(m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      g(i, j) *= scale * dot(data.input(i), data.input(j));
  g.symmetrize();
  return g;
}

std::string to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::A: return "a";
    case KernelKind::W: return "w";
  }
  throw Error("to_string: invalid kernel kind");
}

SymmetricMatrix kernel_mc(const Dataset& data, double eps, KernelKind kind,
                          std::size_t samples, std::uint64_t seed,
                          const Activation& act) {
  if (samples == 0) throw Error("kernel_mc: samples must be at least 1");
  if (!(eps > 0.0)) throw Error("kernel_mc: eps must be positive");
  const std::size_t n = data.n();
  const std::size_t d = data.d();
  Pcg32 rng(derive_stream(seed, kStreamKernel,
                          static_cast<std::uint64_t>(kind), d));
  SymmetricMatrix k_sum(n);
  Vec w(d);
  Vec u(n);
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t j = 0; j < d; ++j) w[j] = rng.next_normal();
    if (kind == KernelKind::A) {
      for (std::size_t i = 0; i < n; ++i)
        u[i] = scaled_sigma(act, dot(w, data.input(i)), eps);
    } else {
      for (std::size_t i = 0; i < n; ++i)
        u[i] = act.eval_d1(eps * dot(w, data.input(i)));
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) k_sum(i, j) += u[i] * u[j];
  }
  const double inv_s = 1.0 / static_cast<double>(samples);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      k_sum(i, j) *= inv_s;
      if (kind == KernelKind::W)
        k_sum(i, j) *= dot(data.input(i), data.input(j));
    }
  k_sum.symmetrize();
  return k_sum;
}

KernelMargin kernel_least_eigen_margin(const Dataset& data, double eps,
                                       KernelKind kind, std::size_t samples,
                                       std::uint64_t seed, const Activation& act) {
  if (samples < 2)
    throw Error("kernel_least_eigen_margin: need at least 2 samples");
  const SymmetricMatrix k = kernel_mc(data, eps, kind, samples, seed, act);
  const EigenDecomposition eig = jacobi_eigen(k);
  const std::size_t n = data.n();
  const std::size_t d = data.d();
  Vec v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = eig.vectors(i, 0);

  // Second pass over the same stream: per-sample quadratic form v' K_s v,
  // whose mean is the lambda_min estimate and whose spread gives its
  // standard error.
  Pcg32 rng(derive_stream(seed, kStreamKernel,
                          static_cast<std::uint64_t>(kind), d));
  Vec w(d);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t j = 0; j < d; ++j) w[j] = rng.next_normal();
    double xi = 0.0;
    if (kind == KernelKind::A) {
      double proj = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        proj += v[i] * scaled_sigma(act, dot(w, data.input(i)), eps);
      xi = proj * proj;
    } else {
      Vec combo(d, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const double coef = v[i] * act.eval_d1(eps * dot(w, data.input(i)));
        const auto x = data.input(i);
        for (std::size_t j = 0; j < d; ++j) combo[j] += coef * x[j];
      }
      xi = dot(combo, combo);
    }
    sum += xi;
    sum_sq += xi * xi;
  }
  const double sd = static_cast<double>(samples);
  const double mean = sum / sd;
  const double var = std::max(0.0, (sum_sq - sd * mean * mean) / (sd - 1.0));

  KernelMargin out;
  out.lambda_min = mean;
  out.standard_error = std::sqrt(var / sd);
  out.margin = out.standard_error > 0.0
                   ? out.lambda_min / out.standard_error
                   : (out.lambda_min > 0.0
                          ? std::numeric_limits<double>::infinity()
                          : 0.0);
  return out;
}

DecayBoundReport decay_bound_check(const Trajectory& trajectory, double lambda_a,
                                   double lambda_w, const ScalingConfig& scaling) {
  if (trajectory.times.empty())
    throw Error("decay_bound_check: trajectory has no recorded rows");
  if (trajectory.meta.n_samples == 0)
    throw Error("decay_bound_check: trajectory metadata lacks the sample count");

  DecayBoundReport report;
  const RegimeLabel label = classify_regime(scaling.classification_gamma(),
                                            scaling.classification_gamma_prime());
  if (label != RegimeLabel::LinearThetaLazy && label != RegimeLabel::LinearWLazy) {
    report.applicable = false;
    report.skip_reason = "scaling classifies as " + to_string(label) +
                         "; the decay bound covers linear-regime configs only";
    return report;
  }
  report.applicable = true;

  const double m_over_n = static_cast<double>(scaling.m) /
                          static_cast<double>(trajectory.meta.n_samples);
  const double nu = scaling.nu;
  const double eps = scaling.eps;
  report.rate = m_over_n * nu * nu * eps * eps *
                ((eps / nu) * lambda_a + (nu / eps) * lambda_w);

  const double loss0 = trajectory.loss.front();
  report.passed = true;
  for (std::size_t i = 0; i < trajectory.times.size(); ++i) {
    const double t = trajectory.times[i];
    const double actual = trajectory.loss[i];
    const double bound = std::exp(-report.rate * t) * loss0;
    report.times.push_back(t);
    report.actual.push_back(actual);
    report.bound.push_back(bound);
    report.bound_ratio.push_back(actual > 0.0
                                     ? bound / actual
                                     : std::numeric_limits<double>::infinity());
    if (actual > bound * (1.0 + 1e-6)) report.passed = false;
  }
  return report;
}

}  // namespace condlab
