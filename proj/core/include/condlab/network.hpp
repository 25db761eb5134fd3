#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "condlab/activation.hpp"
#include "condlab/dataset.hpp"
#include "condlab/linalg.hpp"
#include "condlab/scaling.hpp"

namespace condlab {

// Parameters of the two-layer model in normalized coordinates: the network
// output is nu * eps * sum_k a_k * ss(w_k . x, eps) with ss(s, eps) =
// sigma(eps * s) / eps.  Both layers are initialized with unit-variance
// Gaussians; all width dependence lives in the prefactors.
struct NormalizedParams {
  std::size_t m = 0;  // hidden width
  std::size_t d = 0;  // input dimension
  Vec a;              // output weights, size m
  Matrix W;           // inner weights, m x d, row k is w_k
};

// Draws a_1..a_m first, then W row by row, from a stream derived from
// (seed, m, d) so different shapes never share draws.
NormalizedParams init_params(std::size_t m, std::size_t d, std::uint64_t seed);

double forward(const NormalizedParams& params, const ScalingConfig& scaling,
               const Activation& act, std::span<const double> x);

// e_i = f(x_i) - y_i for every sample.
Vec residuals(const NormalizedParams& params, const ScalingConfig& scaling,
              const Activation& act, const Dataset& data);

// Empirical risk (1 / 2n) * sum_i e_i^2.
double loss_from_residuals(std::span<const double> e);
double loss(const NormalizedParams& params, const ScalingConfig& scaling,
            const Activation& act, const Dataset& data);

// Time derivative of the normalized flow.  The cross-coupled prefactors
// (eps/nu on the outer layer, nu/eps on the inner one) make the dynamics
// follow the negative risk gradient preconditioned by 1/nu^2 and 1/eps^2.
struct FlowRhs {
  Vec da;     // size m
  Matrix dW;  // m x d
};

void flow_rhs(const NormalizedParams& params, const ScalingConfig& scaling,
              const Activation& act, const Dataset& data, FlowRhs& out);
FlowRhs flow_rhs(const NormalizedParams& params, const ScalingConfig& scaling,
                 const Activation& act, const Dataset& data);

}  // namespace condlab
