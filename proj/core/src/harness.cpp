#include "condlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <map>
#include <string>
#include <thread>
#include <utility>

#include "condlab/errors.hpp"
#include "condlab/gram.hpp"
#include "condlab/linalg.hpp"
#include "condlab/metrics.hpp"

namespace condlab {

namespace {

// Runs fn(0..count-1) across up to `threads` workers.  Results must be
// written to preallocated slots; the first failing index's exception is
// rethrown after all workers finish, so the outcome does not depend on
// scheduling.
template <class Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  if (threads == 0) {
    threads = std::thread::hardware_concurrency();
    if (threads == 0) threads = 1;
  }
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t n_workers = std::min(threads, count);
  pool.reserve(n_workers);
  for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string cell_tag(double gamma, double gamma_prime, std::size_t m,
                     std::uint64_t seed) {
  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "gamma=%g gamma'=%g m=%zu seed=%llu", gamma, gamma_prime, m,
                static_cast<unsigned long long>(seed));
  return buf;
}

// A condensation event has visibly begun once the ratio climbs this far
// above its starting value; below that the series is still preamble and
// carries no peak worth dating.
constexpr double kPeakRise = 0.1;

// Integrates in short chunks and stops once the condensation ratio has
// peaked and started back down: T_hat is then in hand and the remaining
// horizon would only trace the slow post-fit drift.  Chunk boundaries fall
// on record points, so the stitched series is identical to a single run.
Trajectory integrate_peak_capture(NormalizedParams params,
                                  const ScalingConfig& scaling,
                                  const Activation& act, const Dataset& data,
                                  double dt, double t_max,
                                  const BaseConfig& base,
                                  const CondensationDirection& direction,
                                  std::uint64_t seed) {
  const std::size_t re = base.record_every == 0 ? 1 : base.record_every;
  const std::size_t chunk_steps = 8 * re;
  const double record_dt = dt * static_cast<double>(re);
  auto total_records =
      static_cast<std::size_t>(std::ceil(t_max / record_dt - 1e-9));
  if (total_records == 0) total_records = 1;
  const std::size_t total_steps = total_records * re;

  const Matrix w0 = params.W;
  Trajectory out;
  std::size_t done_steps = 0;
  bool first = true;
  while (done_steps < total_steps) {
    const std::size_t this_steps =
        std::min(chunk_steps, total_steps - done_steps);
    IntegrationSchedule sched;
    sched.t_max = static_cast<double>(this_steps) * dt;
    sched.dt = dt;
    sched.record_every = re;
    sched.stop_loss_ratio = 0.0;
    sched.blowup_norm = base.blowup_norm;
    Trajectory chunk =
        integrate(std::move(params), scaling, act, data, sched, seed, &w0);
    const std::size_t start = first ? 0 : 1;  // row 0 repeats the prior tail
    for (std::size_t r = start; r < chunk.times.size(); ++r) {
      const std::size_t step = done_steps + r * re;
      out.times.push_back(static_cast<double>(step) * dt);
      out.loss.push_back(chunk.loss[r]);
      out.rd.push_back(chunk.rd[r]);
      out.ratio.push_back(chunk.ratio[r]);
      out.q_max.push_back(chunk.q_max[r]);
      out.p_max.push_back(chunk.p_max[r]);
    }
    if (first) {
      out.meta = chunk.meta;
      first = false;
    }
    out.stop_reason = chunk.stop_reason;
    done_steps += this_steps;
    params = std::move(chunk.final_params);

    std::size_t peak_idx = 0;
    for (std::size_t r = 1; r < out.ratio.size(); ++r) {
      if (out.ratio[r] > out.ratio[peak_idx]) peak_idx = r;
    }
    const double peak = out.ratio[peak_idx];
    const double wait =
        std::max(0.3 / direction.z_norm, 0.25 * out.times[peak_idx]);
    if (peak >= out.ratio.front() + kPeakRise &&
        out.times.back() >= out.times[peak_idx] + wait &&
        out.ratio.back() <= 0.999 * peak) {
      break;
    }
  }
  out.final_params = std::move(params);
  return out;
}

// Lazy-side companion to the peak capture above: integrates in chunks and
// stops once the recorded weight metrics have visibly stopped moving.
// Ill-conditioned kernels leave residual modes whose decay outlasts any
// affordable horizon while no longer moving the weights; waiting on them
// would spend the entire budget tracing flat displacement lines.  The loss
// target is enforced at chunk boundaries against the run's initial loss.
Trajectory integrate_until_settled(NormalizedParams params,
                                   const ScalingConfig& scaling,
                                   const Activation& act, const Dataset& data,
                                   double dt, double t_max, double stop_ratio,
                                   const BaseConfig& base, std::uint64_t seed) {
  const std::size_t re = base.record_every == 0 ? 1 : base.record_every;
  const std::size_t chunk_steps = 16 * re;
  const double record_dt = dt * static_cast<double>(re);
  auto total_records =
      static_cast<std::size_t>(std::ceil(t_max / record_dt - 1e-9));
  if (total_records == 0) total_records = 1;
  const std::size_t total_steps = total_records * re;

  const Matrix w0 = params.W;
  Trajectory out;
  std::size_t done_steps = 0;
  std::size_t chunks = 0;
  bool first = true;
  while (done_steps < total_steps) {
    const std::size_t this_steps =
        std::min(chunk_steps, total_steps - done_steps);
    IntegrationSchedule sched;
    sched.t_max = static_cast<double>(this_steps) * dt;
    sched.dt = dt;
    sched.record_every = re;
    sched.stop_loss_ratio = 0.0;
    sched.blowup_norm = base.blowup_norm;
    const double rd_before = out.rd.empty() ? 0.0 : out.rd.back();
    const double ratio_before = out.ratio.empty() ? 0.0 : out.ratio.back();
    Trajectory chunk =
        integrate(std::move(params), scaling, act, data, sched, seed, &w0);
    const std::size_t start = first ? 0 : 1;  // row 0 repeats the prior tail
    for (std::size_t r = start; r < chunk.times.size(); ++r) {
      const std::size_t step = done_steps + r * re;
      out.times.push_back(static_cast<double>(step) * dt);
      out.loss.push_back(chunk.loss[r]);
      out.rd.push_back(chunk.rd[r]);
      out.ratio.push_back(chunk.ratio[r]);
      out.q_max.push_back(chunk.q_max[r]);
      out.p_max.push_back(chunk.p_max[r]);
    }
    if (first) {
      out.meta = chunk.meta;
      first = false;
    }
    out.stop_reason = chunk.stop_reason;
    done_steps += this_steps;
    params = std::move(chunk.final_params);
    ++chunks;

    if (stop_ratio > 0.0 && out.loss.front() > 0.0 &&
        out.loss.back() <= stop_ratio * out.loss.front()) {
      out.stop_reason = StopReason::LossTarget;
      break;
    }
    // Settled: neither the relative displacement nor the alignment ratio
    // moved by a visible fraction over the whole trailing chunk.  A steady
    // linear creep keeps failing this test and runs to the horizon, which
    // is the honest (and affordable) outcome for slowly-moving cells.
    const double drd = std::fabs(out.rd.back() - rd_before);
    const double dratio = std::fabs(out.ratio.back() - ratio_before);
    if (chunks >= 2 && drd <= 1e-4 * std::max(out.rd.back(), 1e-9) &&
        dratio <= 1e-4 * std::max(out.ratio.back(), 1e-9)) {
      break;
    }
  }
  out.final_params = std::move(params);
  return out;
}

}  // namespace

std::string to_string(EmpiricalLabel label) {
  switch (label) {
    case EmpiricalLabel::Lazy:
      return "lazy";
    case EmpiricalLabel::Condensed:
      return "condensed";
    case EmpiricalLabel::Ambiguous:
      return "ambiguous";
  }
  return "ambiguous";
}

std::string to_string(ScalingLawMode mode) {
  return mode == ScalingLawMode::WLag ? "w_lag" : "a_lag";
}

StabilityEstimate estimate_rates(const NormalizedParams& params,
                                 const ScalingConfig& scaling,
                                 const Activation& act, const Dataset& data) {
  SymmetricMatrix g = gram_a(params, scaling, act, data);
  const SymmetricMatrix gw = gram_w(params, scaling, act, data);
  for (std::size_t i = 0; i < g.data.size(); ++i) g.data[i] += gw.data[i];
  const EigenDecomposition eig = jacobi_eigen(g);
  const double rate = static_cast<double>(params.m) /
                      (static_cast<double>(data.n()) * scaling.nu * scaling.eps);
  StabilityEstimate est;
  est.rate_hi = rate * std::max(0.0, eig.values.back());
  est.rate_lo = rate * std::max(0.0, eig.values.front());
  return est;
}

RunResult run_single(double gamma, double gamma_prime, std::size_t m,
                     std::uint64_t seed, const BaseConfig& base) {
  const ScalingConfig scaling = from_exponents(
      m, 0.5 * (gamma + gamma_prime), 0.5 * (gamma - gamma_prime));
  const Activation act = activation_from_name(base.activation);
  const Dataset data = synth_dataset(base.n, base.d, seed, base.label_scale);
  const CondensationDirection direction = compute_direction(data);
  const RegimeLabel label = classify_regime(gamma, gamma_prime);
  const bool condensed = label == RegimeLabel::CondensedWLag ||
                         label == RegimeLabel::CondensedALag;
  const bool linear_lazy = label == RegimeLabel::LinearThetaLazy ||
                           label == RegimeLabel::LinearWLazy;

  const NormalizedParams params0 = init_params(m, base.d, seed);

  StabilityEstimate rates;
  if (base.adaptive) rates = estimate_rates(params0, scaling, act, data);

  double dt = base.dt;
  if (dt <= 0.0) {
    dt = suggest_step(scaling, direction);
    // A stepping-stone for stiff cells: keep lambda_max(G) * dt inside the
    // explicit stability region with margin.
    if (base.adaptive && rates.rate_hi > 0.0) {
      dt = std::min(dt, 0.7 / rates.rate_hi);
    }
  }

  double t_max = base.t_max;
  if (t_max <= 0.0) {
    if (label == RegimeLabel::CondensedWLag) {
      t_max = 4.0 *
              (1.0 + (gamma - gamma_prime - 1.0) / 8.0 *
                         std::log(static_cast<double>(m))) /
              direction.z_norm;
    } else {
      t_max = 8.0;
    }
    // Lazy cells freeze once the residual has decayed; integrating past
    // that point cannot move sup_rd, so cap the horizon at ~20 slow-mode
    // time constants.
    if (base.adaptive && linear_lazy && rates.rate_lo > 0.0) {
      t_max = std::min(t_max, std::max(20.0 / rates.rate_lo, 50.0 * dt));
    }
  }

  double stop_ratio = base.stop_loss_ratio;
  if (base.adaptive && !condensed && stop_ratio == 0.0) stop_ratio = 1e-9;

  int attempts = 0;
  for (;;) {
    try {
      Trajectory traj;
      if (condensed) {
        traj = integrate_peak_capture(params0, scaling, act, data, dt, t_max,
                                      base, direction, seed);
      } else if (base.adaptive && base.t_max <= 0.0) {
        traj = integrate_until_settled(params0, scaling, act, data, dt, t_max,
                                       stop_ratio, base, seed);
      } else {
        IntegrationSchedule sched;
        sched.t_max = t_max;
        sched.dt = dt;
        sched.record_every = base.record_every;
        sched.stop_loss_ratio = stop_ratio;
        sched.blowup_norm = base.blowup_norm;
        traj = integrate(params0, scaling, act, data, sched, seed);
        traj.snapshots.clear();
        traj.snapshot_times.clear();
      }

      const MetricSeries series = series_from_summaries(traj);
      const THat th = detect_T_hat(series);
      const SaturationReport sat = check_saturation(series, base.saturation_tol);

      RunResult result;
      result.row.m = m;
      result.row.gamma = gamma;
      result.row.gamma_prime = gamma_prime;
      result.row.seed = seed;
      result.row.t_hat = th.t_hat;
      result.row.peak_ratio = th.peak_ratio;
      result.row.sup_rd = *std::max_element(series.rd.begin(), series.rd.end());
      result.row.final_loss_ratio =
          series.loss.front() > 0.0 ? series.loss.back() / series.loss.front()
                                    : 1.0;
      // The tail test alone cannot tell a settled peak from a window that
      // closed before the alignment ever moved (a barely-clipped horizon
      // leaves a flat series whose tail hugs its own maximum).  For cells
      // whose scaling predicts a peak, additionally demand the rise that
      // the capture loop itself waits for.
      bool trusted = sat.saturated;
      if (condensed) {
        trusted = trusted &&
                  th.peak_ratio >= series.ratio.front() + kPeakRise;
      }
      result.row.horizon_limited = !trusted;
      result.trajectory = std::move(traj);
      return result;
    } catch (const Blowup& b) {
      // A pinned dt is honored; the automatic policy backs off and retries
      // from t = 0, which keeps the outcome a function of the config alone.
      if (!base.adaptive || base.dt > 0.0 || attempts >= 3) {
        throw Blowup(std::string(b.what()) + " [" +
                         cell_tag(gamma, gamma_prime, m, seed) + "]",
                     b.t_blowup);
      }
      ++attempts;
      dt *= 0.25;
    }
  }
}

std::vector<SweepRow> run_width_sweep(double gamma, double gamma_prime,
                                      const std::vector<std::size_t>& widths,
                                      const std::vector<std::uint64_t>& seeds,
                                      const BaseConfig& base) {
  if (widths.empty()) throw Error("run_width_sweep: widths must be nonempty");
  for (std::size_t i = 0; i < widths.size(); ++i) {
    if (widths[i] < 16) {
      throw Error("run_width_sweep: every width must be at least 16");
    }
    if (i > 0 && widths[i] <= widths[i - 1]) {
      throw Error("run_width_sweep: widths must be strictly increasing");
    }
  }
  if (seeds.empty()) throw Error("run_width_sweep: seeds must be nonempty");

  const std::size_t count = widths.size() * seeds.size();
  std::vector<SweepRow> rows(count);
  parallel_for(count, base.threads, [&](std::size_t idx) {
    const std::size_t wi = idx / seeds.size();
    const std::size_t si = idx % seeds.size();
    rows[idx] =
        run_single(gamma, gamma_prime, widths[wi], seeds[si], base).row;
  });
  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    if (a.m != b.m) return a.m < b.m;
    return a.seed < b.seed;
  });
  return rows;
}

RegressionFit ols_fit(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw DimensionMismatch("ols_fit: xs and ys differ in length");
  }
  const std::size_t n = xs.size();
  if (n < 2) throw DegenerateAbscissa("ols_fit: need at least two points");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) {
      throw Error("ols_fit: non-finite input");
    }
  }

  double mx = 0.0;
  double my = 0.0;
  double sum_x2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
    sum_x2 += xs[i] * xs[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);

  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx;
    sxx += dx * dx;
    sxy += dx * (ys[i] - my);
  }
  if (sxx <= 1e-28 * std::max(1.0, sum_x2)) {
    throw DegenerateAbscissa("ols_fit: abscissa values are all equal");
  }

  RegressionFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.n_points = n;

  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double pred = fit.intercept + fit.slope * xs[i];
    ss_res += (ys[i] - pred) * (ys[i] - pred);
    ss_tot += (ys[i] - my) * (ys[i] - my);
  }
  // A constant response carries no variance to explain; report 0 rather
  // than the indeterminate 1 - 0/0.
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
  fit.r_squared = std::clamp(fit.r_squared, 0.0, 1.0);
  return fit;
}

RegressionFit fit_scaling_law(const std::vector<SweepRow>& rows,
                              ScalingLawMode mode) {
  if (rows.empty()) throw Error("fit_scaling_law: no rows");

  std::vector<std::size_t> limited;
  for (const SweepRow& row : rows) {
    if (row.horizon_limited) {
      if (std::find(limited.begin(), limited.end(), row.m) == limited.end()) {
        limited.push_back(row.m);
      }
    }
  }
  if (!limited.empty()) {
    std::sort(limited.begin(), limited.end());
    std::string msg =
        "fit_scaling_law: ratio not saturated before the horizon at widths:";
    for (std::size_t m : limited) msg += " " + std::to_string(m);
    throw HorizonLimited(msg);
  }

  std::map<std::size_t, std::vector<double>> by_width;
  for (const SweepRow& row : rows) by_width[row.m].push_back(row.t_hat);
  if (by_width.size() < 3) {
    throw Error("fit_scaling_law: need at least three distinct widths");
  }

  std::vector<double> xs;
  std::vector<double> ys;
  xs.reserve(by_width.size());
  ys.reserve(by_width.size());
  for (auto& [m, vals] : by_width) {
    // Sum in value order so the mean is a function of the row multiset, not
    // of the order the caller happened to store the rows in.
    std::sort(vals.begin(), vals.end());
    double sum = 0.0;
    for (double v : vals) sum += v;
    const double mean_t = sum / static_cast<double>(vals.size());
    xs.push_back(std::log(static_cast<double>(m)));
    if (mode == ScalingLawMode::WLag) {
      ys.push_back(mean_t);
    } else {
      if (mean_t <= 0.0) {
        throw Error("fit_scaling_law: nonpositive mean t_hat at width " +
                    std::to_string(m));
      }
      ys.push_back(std::log(mean_t));
    }
  }
  return ols_fit(xs, ys);
}

std::vector<PhaseCell> run_phase_grid(const std::vector<double>& gammas,
                                      const std::vector<double>& gamma_primes,
                                      std::size_t m_probe,
                                      const std::vector<std::uint64_t>& seeds,
                                      const BaseConfig& base) {
  if (gammas.empty() || gamma_primes.empty()) {
    throw Error("run_phase_grid: exponent grids must be nonempty");
  }
  if (seeds.empty()) throw Error("run_phase_grid: seeds must be nonempty");
  if (m_probe < 16) throw Error("run_phase_grid: probe width must be at least 16");

  const std::size_t n_cells = gammas.size() * gamma_primes.size();
  const std::size_t count = n_cells * seeds.size();
  std::vector<SweepRow> rows(count);
  parallel_for(count, base.threads, [&](std::size_t idx) {
    const std::size_t cell = idx / seeds.size();
    const std::size_t si = idx % seeds.size();
    const double gamma = gammas[cell / gamma_primes.size()];
    const double gamma_prime = gamma_primes[cell % gamma_primes.size()];
    rows[idx] = run_single(gamma, gamma_prime, m_probe, seeds[si], base).row;
  });

  std::vector<PhaseCell> cells(n_cells);
  for (std::size_t c = 0; c < n_cells; ++c) {
    PhaseCell& cell = cells[c];
    cell.gamma = gammas[c / gamma_primes.size()];
    cell.gamma_prime = gamma_primes[c % gamma_primes.size()];
    cell.m_probe = m_probe;
    cell.theory_label = classify_regime(cell.gamma, cell.gamma_prime);

    double sum_rd = 0.0;
    double sum_ratio = 0.0;
    cell.min_sup_rd = cell.min_peak_ratio = std::numeric_limits<double>::infinity();
    cell.max_sup_rd = cell.max_peak_ratio = 0.0;
    for (std::size_t si = 0; si < seeds.size(); ++si) {
      const SweepRow& row = rows[c * seeds.size() + si];
      sum_rd += row.sup_rd;
      sum_ratio += row.peak_ratio;
      cell.min_sup_rd = std::min(cell.min_sup_rd, row.sup_rd);
      cell.max_sup_rd = std::max(cell.max_sup_rd, row.sup_rd);
      cell.min_peak_ratio = std::min(cell.min_peak_ratio, row.peak_ratio);
      cell.max_peak_ratio = std::max(cell.max_peak_ratio, row.peak_ratio);
    }
    cell.mean_sup_rd = sum_rd / static_cast<double>(seeds.size());
    cell.mean_peak_ratio = sum_ratio / static_cast<double>(seeds.size());

    if (cell.mean_sup_rd <= base.rd_lazy_max) {
      cell.empirical_label = EmpiricalLabel::Lazy;
    } else if (cell.mean_sup_rd >= base.rd_cond_min &&
               cell.mean_peak_ratio >= base.ratio_min) {
      cell.empirical_label = EmpiricalLabel::Condensed;
    } else {
      cell.empirical_label = EmpiricalLabel::Ambiguous;
    }
  }
  return cells;
}

}  // namespace condlab
