#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "condlab/activation.hpp"
#include "condlab/dataset.hpp"
#include "condlab/linalg.hpp"
#include "condlab/network.hpp"
#include "condlab/scaling.hpp"

namespace condlab {

// Early in training the flow is well approximated by a linear system whose
// matrix couples the output weight of each neuron to the projection of its
// input weight onto z.  This module builds that system, solves it in closed
// form, and measures how far the real flow deviates from it.

// A is the (d+1) x (d+1) bordered matrix [[0, z^T], [z, 0]]; its only
// nonzero eigenvalues are +-||z||.
struct LinearSystem {
  CondensationDirection direction;
  SymmetricMatrix A;
};

LinearSystem make_linear_system(const CondensationDirection& direction);

struct EigenPair {
  double value = 0.0;
  Vec vector;
};

// The two nonzero eigenpairs (+||z|| first), with the unit eigenvectors
// (1/sqrt(2)) * [ +-1, z_hat ].
std::pair<EigenPair, EigenPair> eigenpairs(const LinearSystem& system);

// Closed-form solution of the linearized flow, reported in ORIGINAL scale
// (nu * a(t), eps * w(t)).  The growth factor is exp(||z|| t); arguments
// that would overflow the exponential raise HorizonExceeded.
struct OriginalScaleState {
  double nu_a = 0.0;
  Vec eps_w;
};

OriginalScaleState analytic_solution(double a0, std::span<const double> w0,
                                     const ScalingConfig& scaling,
                                     const CondensationDirection& direction,
                                     double t);

// Splits w into its component along z_hat and the orthogonal remainder.
struct WDecomposition {
  double par = 0.0;
  Vec perp;
};

WDecomposition decompose_w(std::span<const double> w,
                           std::span<const double> z_hat);

// Per-neuron deviation of the real flow from the linear system:
//   (nu/eps) da_k/dt = w_k . z + f_k
//   dw_k/dt = (nu/eps) (a_k z + g_k)
// both exact identities given these definitions.
struct ResidualTerms {
  Vec f;     // length m
  Matrix g;  // m x d
};

ResidualTerms residual_terms(const NormalizedParams& params,
                             const ScalingConfig& scaling,
                             const Activation& act, const Dataset& data);

// Per-neuron magnitudes: q_k mixes the two layers on a common scale,
// p_k is the plain sup-norm over the neuron's entries.
struct NeuronEnergies {
  Vec q;  // sqrt((nu/eps)^2 a_k^2 + ||w_k||^2)
  Vec p;  // max(|a_k|, ||w_k||_inf)
  double q_max = 0.0;
  double p_max = 0.0;
};

NeuronEnergies neuron_energies(const NormalizedParams& params,
                               const ScalingConfig& scaling);

// First recorded time at which the linear approximation's error budget is
// spent: m * eps^2 * phi(t)^3 exceeds m^{-tau} with tau = (gamma - gamma' - 1)/4
// and phi the running sup of q_max.  Only meaningful for w-lag scalings
// (gamma > 1, 0 <= gamma' < gamma - 1); WrongRegime otherwise.  Returns
// +infinity when the threshold is never crossed.
double effective_horizon(std::span<const double> times,
                         std::span<const double> q_max_series, std::size_t m,
                         double gamma, double gamma_prime);

}  // namespace condlab
