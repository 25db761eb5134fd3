#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "condlab/activation.hpp"
#include "condlab/dataset.hpp"
#include "condlab/integrate.hpp"
#include "condlab/linalg.hpp"
#include "condlab/network.hpp"
#include "condlab/scaling.hpp"

namespace condlab {

// Finite-width kernel matrices governing the loss decay.  Both are n x n,
// symmetric, and positive semidefinite by construction (sums of scaled
// outer products).

// G[a]_ij = (nu eps^3 / m) sum_k ss(w_k.x_i, eps) ss(w_k.x_j, eps)
SymmetricMatrix gram_a(const NormalizedParams& params,
                       const ScalingConfig& scaling, const Activation& act,
                       const Dataset& data);

// G[w]_ij = (nu^3 eps / m) sum_k a_k^2 sigma'(eps w_k.x_i) sigma'(eps w_k.x_j) <x_i, x_j>
SymmetricMatrix gram_w(const NormalizedParams& params,
                       const ScalingConfig& scaling, const Activation& act,
                       const Dataset& data);

// Infinite-width limits of the normalized kernels, estimated by Monte Carlo
// over fresh standard-normal inner weights:
//   kind A: K_ij = E_w[ ss(w.x_i, eps) ss(w.x_j, eps) ]
//   kind W: K_ij = E_w[ sigma'(eps w.x_i) sigma'(eps w.x_j) ] <x_i, x_j>
// For kind W the outer weight's second moment (E a^2 = 1) is folded in
// analytically, halving the variance.  One generator drives the whole
// matrix: entries share each sampled w.
enum class KernelKind { A, W };

std::string to_string(KernelKind kind);

SymmetricMatrix kernel_mc(const Dataset& data, double eps, KernelKind kind,
                          std::size_t samples, std::uint64_t seed,
                          const Activation& act);

// Least-eigenvalue estimate with an uncertainty: lambda_hat = v' K v for the
// minimizing eigenvector v of the Monte Carlo mean, and the standard error
// of the per-sample quadratic form over the same sample stream.
struct KernelMargin {
  double lambda_min = 0.0;
  double standard_error = 0.0;
  double margin = 0.0;  // lambda_min / standard_error
};

KernelMargin kernel_least_eigen_margin(const Dataset& data, double eps,
                                       KernelKind kind, std::size_t samples,
                                       std::uint64_t seed, const Activation& act);

// Checks the linear-regime loss-decay inequality
//   R(t) <= exp(-(m/n) nu^2 eps^2 ((eps/nu) lambda_a + (nu/eps) lambda_w) t) * R(0)
// along a recorded trajectory.  Only applicable to linear-regime scalings;
// otherwise the report is returned with applicable=false and a reason.
struct DecayBoundReport {
  bool applicable = false;
  std::string skip_reason;
  double rate = 0.0;  // decay exponent per unit time
  Vec times;
  Vec actual;        // recorded loss
  Vec bound;         // exp(-rate t) * loss(0)
  Vec bound_ratio;   // bound / actual (>= 1 when the bound holds)
  bool passed = false;
};

DecayBoundReport decay_bound_check(const Trajectory& trajectory, double lambda_a,
                                   double lambda_w, const ScalingConfig& scaling);

}  // namespace condlab
