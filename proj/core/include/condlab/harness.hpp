#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "condlab/activation.hpp"
#include "condlab/dataset.hpp"
#include "condlab/integrate.hpp"
#include "condlab/network.hpp"
#include "condlab/scaling.hpp"

namespace condlab {

// One (width, seed) run reduced to the observables the scaling laws need.
struct SweepRow {
  std::size_t m = 0;
  double gamma = 0.0;
  double gamma_prime = 0.0;
  std::uint64_t seed = 0;
  double t_hat = 0.0;
  double peak_ratio = 0.0;
  double sup_rd = 0.0;
  double final_loss_ratio = 0.0;
  bool horizon_limited = false;
};

struct RegressionFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t n_points = 0;
};

enum class EmpiricalLabel { Lazy, Condensed, Ambiguous };
std::string to_string(EmpiricalLabel label);

// One point of the phase diagram: theoretical classification next to the
// thresholded empirical verdict, with the seed-aggregated evidence.
struct PhaseCell {
  double gamma = 0.0;
  double gamma_prime = 0.0;
  std::size_t m_probe = 0;
  RegimeLabel theory_label = RegimeLabel::Unclassified;
  EmpiricalLabel empirical_label = EmpiricalLabel::Ambiguous;
  double mean_sup_rd = 0.0;
  double min_sup_rd = 0.0;
  double max_sup_rd = 0.0;
  double mean_peak_ratio = 0.0;
  double min_peak_ratio = 0.0;
  double max_peak_ratio = 0.0;
};

// Shared knobs for every run a sweep or grid launches.  Zero-valued dt and
// t_max select the documented policies (suggested step capped by the
// initial stiffness estimate; regime-dependent horizon).
struct BaseConfig {
  std::size_t n = 6;
  std::size_t d = 4;
  double label_scale = 1.0;
  std::string activation = "tanh";
  double dt = 0.0;
  double t_max = 0.0;
  std::size_t record_every = 5;
  double stop_loss_ratio = 0.0;
  double blowup_norm = 1e6;
  double rd_lazy_max = 0.2;
  double rd_cond_min = 2.0;
  double ratio_min = 0.8;
  double saturation_tol = 0.02;
  bool adaptive = true;     // stability-capped dt + early stopping
  std::size_t threads = 0;  // 0: hardware concurrency
};

// Fast and slow decay rates of the residual at the given state, from the
// spectrum of G = G[a] + G[w]: the residual evolves as
// de/dt = -(m / (n nu eps)) G e, so lambda_max bounds the stiffest mode
// (step-size ceiling) and lambda_min the slowest (fit time scale).
struct StabilityEstimate {
  double rate_hi = 0.0;
  double rate_lo = 0.0;
};

StabilityEstimate estimate_rates(const NormalizedParams& params,
                                 const ScalingConfig& scaling,
                                 const Activation& act, const Dataset& data);

// One cell run end to end: synthesize data, initialize, integrate under the
// horizon policy, reduce to a SweepRow.  The returned trajectory carries the
// recorded summary series (no snapshots).
struct RunResult {
  SweepRow row;
  Trajectory trajectory;
};

RunResult run_single(double gamma, double gamma_prime, std::size_t m,
                     std::uint64_t seed, const BaseConfig& base);

// Ladder of widths at fixed (gamma, gamma'), every seed at every width;
// rows sorted by (m, seed).  Widths must be increasing and at least 16.
std::vector<SweepRow> run_width_sweep(double gamma, double gamma_prime,
                                      const std::vector<std::size_t>& widths,
                                      const std::vector<std::uint64_t>& seeds,
                                      const BaseConfig& base);

// Ordinary least squares with R^2 = 1 - SS_res/SS_tot (0 when the response
// is constant).  DegenerateAbscissa on fewer than two points or an
// all-equal abscissa.
RegressionFit ols_fit(std::span<const double> xs, std::span<const double> ys);

// T_hat scaling-law fit over a width ladder: WLag regresses t_hat on ln m,
// ALag regresses ln t_hat on ln m.  Seeds at the same width are averaged
// before the transform.  HorizonLimited when any row's ratio had not
// saturated, listing the offending widths.
enum class ScalingLawMode { WLag, ALag };
std::string to_string(ScalingLawMode mode);

RegressionFit fit_scaling_law(const std::vector<SweepRow>& rows,
                              ScalingLawMode mode);

// Full grid over the (gamma, gamma') plane at a single probe width.  Cells
// are emitted in row-major order (gamma outer, gamma' inner) regardless of
// thread count.
std::vector<PhaseCell> run_phase_grid(const std::vector<double>& gammas,
                                      const std::vector<double>& gamma_primes,
                                      std::size_t m_probe,
                                      const std::vector<std::uint64_t>& seeds,
                                      const BaseConfig& base);

}  // namespace condlab
