#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "condlab/activation.hpp"
#include "condlab/dataset.hpp"
#include "condlab/network.hpp"
#include "condlab/scaling.hpp"

namespace condlab {

// --- classic fourth-order Runge-Kutta over generic state types ---
//
// States need copy assignment plus the two kernels below; derivatives may be
// a different type (the flow uses NormalizedParams with FlowRhs slopes).  A
// right-hand side is any callable rhs(const State&, Deriv&) that fully
// writes the derivative, shape included.

inline void rk4_scale_add(double& y, double c, double k) { y += c * k; }
void rk4_scale_add(Vec& y, double c, const Vec& k);
void rk4_scale_add(NormalizedParams& y, double c, const FlowRhs& k);

inline void rk4_combine(double& y, double h, double k1, double k2, double k3,
                        double k4) {
  y += h / 6.0 * (k1 + 2.0 * (k2 + k3) + k4);
}
void rk4_combine(Vec& y, double h, const Vec& k1, const Vec& k2, const Vec& k3,
                 const Vec& k4);
void rk4_combine(NormalizedParams& y, double h, const FlowRhs& k1,
                 const FlowRhs& k2, const FlowRhs& k3, const FlowRhs& k4);

// Preallocated slopes and stage state, reused across steps.
template <class State, class Deriv = State>
struct Rk4Workspace {
  Deriv k1, k2, k3, k4;
  State stage;
};

template <class State, class Deriv, class Rhs>
void step_rk4(State& y, double h, Rhs&& rhs, Rk4Workspace<State, Deriv>& ws) {
  rhs(y, ws.k1);
  ws.stage = y;
  rk4_scale_add(ws.stage, h / 2.0, ws.k1);
  rhs(ws.stage, ws.k2);
  ws.stage = y;
  rk4_scale_add(ws.stage, h / 2.0, ws.k2);
  rhs(ws.stage, ws.k3);
  ws.stage = y;
  rk4_scale_add(ws.stage, h, ws.k3);
  rhs(ws.stage, ws.k4);
  rk4_combine(y, h, ws.k1, ws.k2, ws.k3, ws.k4);
}

template <class State, class Rhs>
void step_rk4(State& y, double h, Rhs&& rhs) {
  Rk4Workspace<State, State> ws;
  step_rk4(y, h, rhs, ws);
}

// --- fixed-step integration of the training flow ---

struct IntegrationSchedule {
  double t_max = 0.0;
  double dt = 0.0;
  std::size_t record_every = 5;   // steps between recorded rows
  double stop_loss_ratio = 0.0;   // stop once loss <= ratio * loss(0); 0 disables
  double blowup_norm = 1e6;       // per-coordinate escape threshold
};

enum class StopReason { ReachedTMax, LossTarget };
std::string to_string(StopReason reason);

struct TrajectoryMeta {
  ScalingConfig scaling;
  std::uint64_t seed = 0;
  std::size_t n_samples = 0;
  std::string dataset_digest;
  std::string activation;
};

// Row r lives at times[r] = (r * record_every) * dt, computed by
// multiplication so stitched runs agree bit-for-bit.
struct Trajectory {
  Vec times;
  Vec loss;
  Vec rd;     // ||W(t) - W(0)||_F / ||W(0)||_F
  Vec ratio;  // directional concentration of W along z_hat
  Vec q_max;  // largest neuron energy
  Vec p_max;  // largest per-neuron sup-norm

  Vec snapshot_times;
  std::vector<NormalizedParams> snapshots;  // kept only for m <= 4096
  NormalizedParams final_params;

  StopReason stop_reason = StopReason::ReachedTMax;
  TrajectoryMeta meta;
};

// Step-size heuristic: resolves both the data time scale 1/||z|| and the
// faster of the two layer clocks.  Callers facing stiff spectra may override
// it with something smaller.
double suggest_step(const ScalingConfig& scaling,
                    const CondensationDirection& direction);

// Runs the normalized flow from `params`, recording metric rows every
// record_every steps (t = 0 included).  The requested horizon is rounded up
// to a whole number of record intervals, so the last row may slightly
// overshoot t_max.  Throws Blowup when a recorded state exceeds blowup_norm
// or stops being finite.  `w_reference` overrides the displacement baseline,
// letting a caller resume a run in segments without resetting rd.
Trajectory integrate(NormalizedParams params, const ScalingConfig& scaling,
                     const Activation& act, const Dataset& data,
                     const IntegrationSchedule& sched, std::uint64_t seed = 0,
                     const Matrix* w_reference = nullptr);

}  // namespace condlab
