#pragma once

#include <cstddef>
#include <span>

#include "condlab/integrate.hpp"
#include "condlab/linalg.hpp"

namespace condlab {

// ||W - W0||_F / ||W0||_F: how far the inner weights moved, relative to
// their initial size.  ZeroInitialNorm when ||W0||_F vanishes.
double relative_distance(const Matrix& w_t, const Matrix& w_0);

// sqrt(sum_k <w_k, z_hat>^2) / ||W||_F: the fraction of inner-weight mass
// aligned with the condensation direction, in [0, 1].  ZeroNorm when
// ||W||_F vanishes.
double condensation_ratio(const Matrix& w, std::span<const double> z_hat);

// Aligned per-time observables of one run.
struct MetricSeries {
  Vec times;
  Vec loss;
  Vec rd;
  Vec ratio;
  Vec q_max;
  Vec p_max;
};

// Earliest time at which the ratio attains its global maximum over the
// recorded horizon (first-max tie-breaking).
struct THat {
  double t_hat = 0.0;
  double peak_ratio = 0.0;
  std::size_t index = 0;
};

THat detect_T_hat(const MetricSeries& series);

// Full-resolution series from the summaries recorded during integration.
MetricSeries series_from_summaries(const Trajectory& trajectory);

// Recomputes the weight metrics from stored parameter snapshots (loss is
// copied from the matching summary rows).  Coarser than the summary series
// when snapshots were strided.
MetricSeries series_from_snapshots(const Trajectory& trajectory,
                                   std::span<const double> z_hat);

// Snapshot path when snapshots exist, summary path otherwise;
// MissingSummaries when the trajectory carries neither.
MetricSeries build_series(const Trajectory& trajectory,
                          std::span<const double> z_hat);

// Horizon guard for trusting detect_T_hat: the mean ratio over the last
// quarter of the recorded rows must sit within tol of the peak, otherwise
// the run may have been cut before the ratio settled.
struct SaturationReport {
  double peak = 0.0;
  double tail_mean = 0.0;
  bool saturated = false;
};

SaturationReport check_saturation(const MetricSeries& series, double tol = 0.02);

}  // namespace condlab
