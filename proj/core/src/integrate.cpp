#include "condlab/integrate.hpp"

#include <algorithm>
#include <cmath>

#include "condlab/errors.hpp"
#include "condlab/linear_oracle.hpp"
#include "condlab/metrics.hpp"

namespace condlab {

void rk4_scale_add(Vec& y, double c, const Vec& k) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += c * k[i];
}

void rk4_scale_add(NormalizedParams& y, double c, const FlowRhs& k) {
  rk4_scale_add(y.a, c, k.da);
  rk4_scale_add(y.W.data, c, k.dW.data);
}

void rk4_combine(Vec& y, double h, const Vec& k1, const Vec& k2, const Vec& k3,
                 const Vec& k4) {
  const double c = h / 6.0;
  for (std::size_t i = 0; i < y.size(); ++i)
    y[i] += c * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
}

void rk4_combine(NormalizedParams& y, double h, const FlowRhs& k1,
                 const FlowRhs& k2, const FlowRhs& k3, const FlowRhs& k4) {
  rk4_combine(y.a, h, k1.da, k2.da, k3.da, k4.da);
  rk4_combine(y.W.data, h, k1.dW.data, k2.dW.data, k3.dW.data, k4.dW.data);
}

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::ReachedTMax: return "reached_t_max";
    case StopReason::LossTarget: return "loss_target";
  }
  throw Error("to_string: invalid stop reason");
}

double suggest_step(const ScalingConfig& scaling,
                    const CondensationDirection& direction) {
  const double clock = std::min(scaling.kappa_prime, 1.0 / scaling.kappa_prime);
  double dt = std::min(1e-2, std::max(1e-5, 0.05 * std::sqrt(clock)));
  if (direction.z_norm > 0.0) dt = std::min(dt, 0.05 / direction.z_norm);
  return dt;
}

namespace {

void check_schedule(const IntegrationSchedule& sched) {
  if (!(sched.dt > 0.0)) throw Error("integrate: dt must be positive");
  if (!(sched.t_max > 0.0)) throw Error("integrate: t_max must be positive");
  if (sched.record_every == 0)
    throw Error("integrate: record_every must be at least 1");
  if (!(sched.stop_loss_ratio >= 0.0) || sched.stop_loss_ratio >= 1.0)
    throw Error("integrate: stop_loss_ratio must lie in [0, 1)");
  if (!(sched.blowup_norm > 0.0))
    throw Error("integrate: blowup_norm must be positive");
}

}  // namespace

Trajectory integrate(NormalizedParams params, const ScalingConfig& scaling,
                     const Activation& act, const Dataset& data,
                     const IntegrationSchedule& sched, std::uint64_t seed,
                     const Matrix* w_reference) {
  check_schedule(sched);
  const CondensationDirection direction = compute_direction(data);
  const Matrix w0 = w_reference ? *w_reference : params.W;

  // Round the horizon up to whole record intervals; the small overshoot of
  // t_max keeps every recorded time an exact multiple of dt.
  std::size_t total_steps =
      static_cast<std::size_t>(std::ceil(sched.t_max / sched.dt - 1e-9));
  if (total_steps == 0) total_steps = 1;
  const std::size_t re = sched.record_every;
  total_steps = ((total_steps + re - 1) / re) * re;
  const std::size_t n_records = total_steps / re + 1;

  const bool keep_snapshots = params.m <= 4096;
  const std::size_t stride = std::max<std::size_t>(1, (n_records + 255) / 256);

  Trajectory traj;
  traj.meta.scaling = scaling;
  traj.meta.seed = seed;
  traj.meta.n_samples = data.n();
  traj.meta.dataset_digest = dataset_digest(data);
  traj.meta.activation = act.name();

  const auto record = [&](std::size_t r) {
    const double t = static_cast<double>(r * re) * sched.dt;
    const Vec e = residuals(params, scaling, act, data);
    const double l = loss_from_residuals(e);
    const double rd = relative_distance(params.W, w0);
    const double ratio = condensation_ratio(params.W, direction.z_hat);
    const NeuronEnergies energies = neuron_energies(params, scaling);
    if (!std::isfinite(l) || !std::isfinite(energies.q_max) ||
        energies.p_max > sched.blowup_norm)
      throw Blowup("integrate: parameter escape at t=" + std::to_string(t) +
                       " (max magnitude " + std::to_string(energies.p_max) + ")",
                   t);
    traj.times.push_back(t);
    traj.loss.push_back(l);
    traj.rd.push_back(rd);
    traj.ratio.push_back(ratio);
    traj.q_max.push_back(energies.q_max);
    traj.p_max.push_back(energies.p_max);
    if (keep_snapshots && r % stride == 0) {
      traj.snapshot_times.push_back(t);
      traj.snapshots.push_back(params);
    }
    return l;
  };

  const double loss0 = record(0);

  Rk4Workspace<NormalizedParams, FlowRhs> ws;
  const auto rhs = [&](const NormalizedParams& y, FlowRhs& dy) {
    flow_rhs(y, scaling, act, data, dy);
  };

  traj.stop_reason = StopReason::ReachedTMax;
  for (std::size_t r = 1; r < n_records; ++r) {
    for (std::size_t s = 0; s < re; ++s) step_rk4(params, sched.dt, rhs, ws);
    const double l = record(r);
    if (sched.stop_loss_ratio > 0.0 && l <= sched.stop_loss_ratio * loss0) {
      traj.stop_reason = StopReason::LossTarget;
      break;
    }
  }

  if (keep_snapshots &&
      (traj.snapshot_times.empty() || traj.snapshot_times.back() != traj.times.back())) {
    traj.snapshot_times.push_back(traj.times.back());
    traj.snapshots.push_back(params);
  }
  traj.final_params = std::move(params);
  return traj;
}

}  // namespace condlab
