#include "condlab/network.hpp"

#include <cmath>

#include "condlab/errors.hpp"
#include "condlab/rng.hpp"

namespace condlab {

NormalizedParams init_params(std::size_t m, std::size_t d, std::uint64_t seed) {
  if (m == 0 || d == 0) throw Error("init_params: m and d must be positive");
  NormalizedParams p;
  p.m = m;
  p.d = d;
  Pcg32 rng(derive_stream(seed, kStreamParams, m, d));
  p.a.resize(m);
  for (std::size_t k = 0; k < m; ++k) p.a[k] = rng.next_normal();
  p.W = Matrix(m, d);
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t j = 0; j < d; ++j) p.W(k, j) = rng.next_normal();
  return p;
}

double forward(const NormalizedParams& params, const ScalingConfig& scaling,
               const Activation& act, std::span<const double> x) {
  if (x.size() != params.d)
    throw DimensionMismatch("forward: input has dimension " +
                            std::to_string(x.size()) + ", expected " +
                            std::to_string(params.d));
  double sum = 0.0;
  for (std::size_t k = 0; k < params.m; ++k) {
    const double s = dot(params.W.row(k), x);
    sum += params.a[k] * scaled_sigma(act, s, scaling.eps);
  }
  return scaling.kappa * sum;
}

Vec residuals(const NormalizedParams& params, const ScalingConfig& scaling,
              const Activation& act, const Dataset& data) {
  if (data.d() != params.d)
    throw DimensionMismatch("residuals: dataset dimension " +
                            std::to_string(data.d()) + " does not match model " +
                            std::to_string(params.d));
  const std::size_t n = data.n();
  Vec e(n);
  for (std::size_t i = 0; i < n; ++i)
    e[i] = forward(params, scaling, act, data.input(i)) - data.label(i);
  return e;
}

double loss_from_residuals(std::span<const double> e) {
  double sum = 0.0;
  for (double v : e) sum += v * v;
  return 0.5 * sum / static_cast<double>(e.size());
}

double loss(const NormalizedParams& params, const ScalingConfig& scaling,
            const Activation& act, const Dataset& data) {
  const Vec e = residuals(params, scaling, act, data);
  return loss_from_residuals(e);
}

void flow_rhs(const NormalizedParams& params, const ScalingConfig& scaling,
              const Activation& act, const Dataset& data, FlowRhs& out) {
  if (data.d() != params.d)
    throw DimensionMismatch("flow_rhs: dataset dimension " +
                            std::to_string(data.d()) + " does not match model " +
                            std::to_string(params.d));
  const std::size_t m = params.m;
  const std::size_t d = params.d;
  const std::size_t n = data.n();
  const double eps = scaling.eps;

  // Scratch tables reused across steps: ss_ki and sigma'(eps s_ki) for every
  // neuron/sample pair, sharing one transcendental evaluation per entry.
  thread_local Matrix ss;
  thread_local Matrix d1;
  thread_local Vec e;
  if (ss.rows != m || ss.cols != n) {
    ss = Matrix(m, n);
    d1 = Matrix(m, n);
  }
  e.assign(n, 0.0);

  for (std::size_t k = 0; k < m; ++k) {
    const auto wk = params.W.row(k);
    const double ak = params.a[k];
    for (std::size_t i = 0; i < n; ++i) {
      const double s = dot(wk, data.input(i));
      double ss_ki = 0.0;
      double d1_ki = 0.0;
      act.eval_scaled_pair(s, eps, ss_ki, d1_ki);
      ss(k, i) = ss_ki;
      d1(k, i) = d1_ki;
      e[i] += ak * ss_ki;
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    e[i] = scaling.kappa * e[i] - data.label(i);

  out.da.assign(m, 0.0);
  if (out.dW.rows != m || out.dW.cols != d) out.dW = Matrix(m, d);
  std::fill(out.dW.data.begin(), out.dW.data.end(), 0.0);

  const double ca = -(eps / scaling.nu) / static_cast<double>(n);
  const double cw = -(scaling.nu / eps) / static_cast<double>(n);
  for (std::size_t k = 0; k < m; ++k) {
    double acc = 0.0;
    const double ak = params.a[k];
    double* dwk = &out.dW(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      acc += e[i] * ss(k, i);
      const double coef = cw * e[i] * ak * d1(k, i);
      const auto xi = data.input(i);
      for (std::size_t j = 0; j < d; ++j) dwk[j] += coef * xi[j];
    }
    out.da[k] = ca * acc;
  }
}

FlowRhs flow_rhs(const NormalizedParams& params, const ScalingConfig& scaling,
                 const Activation& act, const Dataset& data) {
  FlowRhs out;
  flow_rhs(params, scaling, act, data, out);
  return out;
}

}  // namespace condlab
