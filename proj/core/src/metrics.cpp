#include "condlab/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "condlab/errors.hpp"
#include "condlab/linear_oracle.hpp"

namespace condlab {

double relative_distance(const Matrix& w_t, const Matrix& w_0) {
  if (w_t.rows != w_0.rows || w_t.cols != w_0.cols)
    throw DimensionMismatch("relative_distance: matrix shapes differ");
  const double denom = frobenius(w_0);
  if (!(denom > 0.0))
    throw ZeroInitialNorm("relative_distance: reference weights have zero norm");
  double sum = 0.0;
  for (std::size_t i = 0; i < w_t.data.size(); ++i) {
    const double diff = w_t.data[i] - w_0.data[i];
    sum += diff * diff;
  }
  return std::sqrt(sum) / denom;
}

double condensation_ratio(const Matrix& w, std::span<const double> z_hat) {
  if (w.cols != z_hat.size())
    throw DimensionMismatch("condensation_ratio: direction dimension differs");
  const double denom = frobenius(w);
  if (!(denom > 0.0))
    throw ZeroNorm("condensation_ratio: weight matrix has zero norm");
  double aligned = 0.0;
  for (std::size_t k = 0; k < w.rows; ++k) {
    const double proj = dot(w.row(k), z_hat);
    aligned += proj * proj;
  }
  return std::sqrt(aligned) / denom;
}

THat detect_T_hat(const MetricSeries& series) {
  if (series.times.empty() || series.ratio.size() != series.times.size())
    throw Error("detect_T_hat: series must be nonempty with aligned ratio");
  THat out;
  out.index = 0;
  out.peak_ratio = series.ratio[0];
  for (std::size_t i = 1; i < series.ratio.size(); ++i) {
    if (series.ratio[i] > out.peak_ratio) {
      out.peak_ratio = series.ratio[i];
      out.index = i;
    }
  }
  out.t_hat = series.times[out.index];
  return out;
}

MetricSeries series_from_summaries(const Trajectory& trajectory) {
  if (trajectory.times.empty())
    throw MissingSummaries("series_from_summaries: trajectory has no recorded rows");
  MetricSeries series;
  series.times = trajectory.times;
  series.loss = trajectory.loss;
  series.rd = trajectory.rd;
  series.ratio = trajectory.ratio;
  series.q_max = trajectory.q_max;
  series.p_max = trajectory.p_max;
  return series;
}

MetricSeries series_from_snapshots(const Trajectory& trajectory,
                                   std::span<const double> z_hat) {
  if (trajectory.snapshots.empty())
    throw MissingSummaries("series_from_snapshots: trajectory has no snapshots");
  const Matrix& w0 = trajectory.snapshots.front().W;
  MetricSeries series;
  std::size_t summary_row = 0;
  for (std::size_t s = 0; s < trajectory.snapshots.size(); ++s) {
    const NormalizedParams& snap = trajectory.snapshots[s];
    const double t = trajectory.snapshot_times[s];
    series.times.push_back(t);
    series.rd.push_back(relative_distance(snap.W, w0));
    series.ratio.push_back(condensation_ratio(snap.W, z_hat));
    const NeuronEnergies energies = neuron_energies(snap, trajectory.meta.scaling);
    series.q_max.push_back(energies.q_max);
    series.p_max.push_back(energies.p_max);
    while (summary_row < trajectory.times.size() &&
           trajectory.times[summary_row] != t)
      ++summary_row;
    if (summary_row == trajectory.times.size())
      throw Error("series_from_snapshots: snapshot time not found in summaries");
    series.loss.push_back(trajectory.loss[summary_row]);
  }
  return series;
}

MetricSeries build_series(const Trajectory& trajectory,
                          std::span<const double> z_hat) {
  if (!trajectory.snapshots.empty())
    return series_from_snapshots(trajectory, z_hat);
  return series_from_summaries(trajectory);
}

SaturationReport check_saturation(const MetricSeries& series, double tol) {
  const THat peak = detect_T_hat(series);
  const std::size_t n = series.ratio.size();
  const std::size_t tail = std::max<std::size_t>(1, n / 4);
  double sum = 0.0;
  for (std::size_t i = n - tail; i < n; ++i) sum += series.ratio[i];
  SaturationReport report;
  report.peak = peak.peak_ratio;
  report.tail_mean = sum / static_cast<double>(tail);
  report.saturated = (report.peak - report.tail_mean) <= tol * report.peak;
  return report;
}

}  // namespace condlab
