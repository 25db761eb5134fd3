#include "condlab/cli.hpp"

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "condlab/activation.hpp"
#include "condlab/dataset.hpp"
#include "condlab/errors.hpp"
#include "condlab/gram.hpp"
#include "condlab/harness.hpp"
#include "condlab/integrate.hpp"
#include "condlab/io.hpp"
#include "condlab/metrics.hpp"
#include "condlab/network.hpp"
#include "condlab/scaling.hpp"
#include "condlab/version.hpp"

namespace condlab {

namespace {

using nlohmann::json;

struct CliContext {
  std::string config_path;
  std::string out_dir = ".";
  std::string config_text;
  bool has_seed = false;
  std::uint64_t seed = 0;
  bool has_threads = false;
  std::size_t threads = 0;
};

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

std::string iso_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// --- typed config readers; every failure names section and key ---

std::string key_msg(const char* section, const char* key) {
  return std::string("config key '") + key + "' in section '" + section + "'";
}

void check_keys(const json& sec, const char* section,
                const std::set<std::string>& allowed) {
  for (const auto& item : sec.items()) {
    if (allowed.find(item.key()) == allowed.end()) {
      throw ConfigError("unknown config key '" + item.key() + "' in section '" +
                        section + "'");
    }
  }
}

const json& require_key(const json& sec, const char* section, const char* key) {
  const auto it = sec.find(key);
  if (it == sec.end()) {
    throw ConfigError(std::string("section '") + section +
                      "' is missing required key '" + key + "'");
  }
  return *it;
}

double as_double(const json& v, const char* section, const char* key) {
  if (!v.is_number()) {
    throw ConfigError(key_msg(section, key) + " must be a number");
  }
  return v.get<double>();
}

std::uint64_t as_u64(const json& v, const char* section, const char* key) {
  if (!v.is_number_integer() ||
      (v.is_number_integer() && !v.is_number_unsigned() &&
       v.get<std::int64_t>() < 0)) {
    throw ConfigError(key_msg(section, key) + " must be a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

std::size_t as_size(const json& v, const char* section, const char* key) {
  return static_cast<std::size_t>(as_u64(v, section, key));
}

std::string as_string(const json& v, const char* section, const char* key) {
  if (!v.is_string()) {
    throw ConfigError(key_msg(section, key) + " must be a string");
  }
  return v.get<std::string>();
}

bool as_bool(const json& v, const char* section, const char* key) {
  if (!v.is_boolean()) {
    throw ConfigError(key_msg(section, key) + " must be a boolean");
  }
  return v.get<bool>();
}

double get_double(const json& sec, const char* section, const char* key,
                  double dflt) {
  const auto it = sec.find(key);
  return it == sec.end() ? dflt : as_double(*it, section, key);
}

std::uint64_t get_u64(const json& sec, const char* section, const char* key,
                      std::uint64_t dflt) {
  const auto it = sec.find(key);
  return it == sec.end() ? dflt : as_u64(*it, section, key);
}

std::size_t get_size(const json& sec, const char* section, const char* key,
                     std::size_t dflt) {
  const auto it = sec.find(key);
  return it == sec.end() ? dflt : as_size(*it, section, key);
}

std::string get_string(const json& sec, const char* section, const char* key,
                       const std::string& dflt) {
  const auto it = sec.find(key);
  return it == sec.end() ? dflt : as_string(*it, section, key);
}

bool get_bool(const json& sec, const char* section, const char* key,
              bool dflt) {
  const auto it = sec.find(key);
  return it == sec.end() ? dflt : as_bool(*it, section, key);
}

template <class T, class ElemFn>
std::vector<T> require_array(const json& sec, const char* section,
                             const char* key, ElemFn&& elem) {
  const json& v = require_key(sec, section, key);
  if (!v.is_array()) {
    throw ConfigError(key_msg(section, key) + " must be an array");
  }
  std::vector<T> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(elem(e));
  if (out.empty()) {
    throw ConfigError(key_msg(section, key) + " must be nonempty");
  }
  return out;
}

std::vector<double> require_double_array(const json& sec, const char* section,
                                         const char* key) {
  return require_array<double>(
      sec, section, key,
      [&](const json& e) { return as_double(e, section, key); });
}

std::vector<std::size_t> require_size_array(const json& sec,
                                            const char* section,
                                            const char* key) {
  return require_array<std::size_t>(
      sec, section, key,
      [&](const json& e) { return as_size(e, section, key); });
}

std::vector<std::uint64_t> require_u64_array(const json& sec,
                                             const char* section,
                                             const char* key) {
  return require_array<std::uint64_t>(
      sec, section, key,
      [&](const json& e) { return as_u64(e, section, key); });
}

// --- shared domain readers ---

Activation read_activation(const json& sec, const char* section) {
  const std::string name = get_string(sec, section, "activation", "tanh");
  try {
    return activation_from_name(name);
  } catch (const UnknownActivation&) {
    throw ConfigError(key_msg(section, "activation") +
                      " names an unknown activation: '" + name + "'");
  }
}

Dataset read_dataset(const json& sec, const char* section,
                     std::uint64_t seed) {
  if (sec.contains("data_path")) {
    if (sec.contains("n") || sec.contains("d") || sec.contains("label_scale")) {
      throw ConfigError(std::string("section '") + section +
                        "': 'data_path' excludes 'n', 'd' and 'label_scale'");
    }
    return load_dataset(as_string(sec.at("data_path"), section, "data_path"));
  }
  const std::size_t n = as_size(require_key(sec, section, "n"), section, "n");
  const std::size_t d = as_size(require_key(sec, section, "d"), section, "d");
  if (n == 0 || d == 0) {
    throw ConfigError(std::string("section '") + section +
                      "': 'n' and 'd' must be positive");
  }
  const double label_scale = get_double(sec, section, "label_scale", 1.0);
  if (!(label_scale > 0.0)) {
    throw ConfigError(key_msg(section, "label_scale") + " must be positive");
  }
  return synth_dataset(n, d, seed, label_scale);
}

ScalingConfig read_scaling(const json& sec, const char* section,
                           std::size_t d) {
  const std::size_t m = as_size(require_key(sec, section, "m"), section, "m");
  if (m < 2) {
    throw ConfigError(key_msg(section, "m") + " must be at least 2");
  }
  const bool has_scheme = sec.contains("scheme");
  const bool has_exponents = sec.contains("gamma1") || sec.contains("gamma2");
  if (has_scheme && has_exponents) {
    throw ConfigError(std::string("section '") + section +
                      "': 'scheme' excludes 'gamma1'/'gamma2'");
  }
  if (has_scheme) {
    const std::string name = as_string(sec.at("scheme"), section, "scheme");
    try {
      return named_scheme(name, m, d);
    } catch (const UnknownScheme&) {
      throw ConfigError(key_msg(section, "scheme") +
                        " names an unknown scheme: '" + name + "'");
    }
  }
  if (!sec.contains("gamma1") || !sec.contains("gamma2")) {
    throw ConfigError(std::string("section '") + section +
                      "' needs either 'scheme' or both 'gamma1' and 'gamma2'");
  }
  return from_exponents(m, as_double(sec.at("gamma1"), section, "gamma1"),
                        as_double(sec.at("gamma2"), section, "gamma2"));
}

BaseConfig read_base_config(const json& sec, const char* section,
                            const CliContext& ctx) {
  BaseConfig base;
  base.n = get_size(sec, section, "n", base.n);
  base.d = get_size(sec, section, "d", base.d);
  if (base.n == 0 || base.d == 0) {
    throw ConfigError(std::string("section '") + section +
                      "': 'n' and 'd' must be positive");
  }
  base.label_scale = get_double(sec, section, "label_scale", base.label_scale);
  if (!(base.label_scale > 0.0)) {
    throw ConfigError(key_msg(section, "label_scale") + " must be positive");
  }
  base.activation = get_string(sec, section, "activation", base.activation);
  read_activation(sec, section);  // reject bad names before any compute
  base.dt = get_double(sec, section, "dt", base.dt);
  base.t_max = get_double(sec, section, "t_max", base.t_max);
  if (base.dt < 0.0 || base.t_max < 0.0) {
    throw ConfigError(std::string("section '") + section +
                      "': 'dt' and 't_max' must be nonnegative (0 = automatic)");
  }
  base.record_every = get_size(sec, section, "record_every", base.record_every);
  if (base.record_every == 0) {
    throw ConfigError(key_msg(section, "record_every") + " must be positive");
  }
  base.stop_loss_ratio =
      get_double(sec, section, "stop_loss_ratio", base.stop_loss_ratio);
  if (base.stop_loss_ratio < 0.0 || base.stop_loss_ratio >= 1.0) {
    throw ConfigError(key_msg(section, "stop_loss_ratio") +
                      " must lie in [0, 1)");
  }
  base.blowup_norm = get_double(sec, section, "blowup_norm", base.blowup_norm);
  if (!(base.blowup_norm > 0.0)) {
    throw ConfigError(key_msg(section, "blowup_norm") + " must be positive");
  }
  base.rd_lazy_max = get_double(sec, section, "rd_lazy_max", base.rd_lazy_max);
  base.rd_cond_min = get_double(sec, section, "rd_cond_min", base.rd_cond_min);
  base.ratio_min = get_double(sec, section, "ratio_min", base.ratio_min);
  base.saturation_tol =
      get_double(sec, section, "saturation_tol", base.saturation_tol);
  base.adaptive = get_bool(sec, section, "adaptive", base.adaptive);
  base.threads = get_size(sec, section, "threads", base.threads);
  if (ctx.has_threads) base.threads = ctx.threads;
  return base;
}

std::vector<std::uint64_t> read_seeds(const json& sec, const char* section,
                                      const CliContext& ctx) {
  if (ctx.has_seed) return {ctx.seed};
  return require_u64_array(sec, section, "seeds");
}

void write_manifest(const CliContext& ctx, const std::string& command,
                    const json& seed_value,
                    const std::vector<std::string>& outputs,
                    const std::string& stop_reason = "") {
  json m;
  m["command"] = command;
  m["version"] = kVersion;
  m["schema_version"] = kSchemaVersion;
  m["config_digest"] = content_digest(ctx.config_text);
  m["config_path"] = ctx.config_path;
  m["seed"] = seed_value;
  m["outputs"] = outputs;
  if (!stop_reason.empty()) m["stop_reason"] = stop_reason;
  m["timestamp"] = iso_timestamp();
  write_text_atomic(join_path(ctx.out_dir, "manifest.json"), m.dump(2) + "\n");
}

// --- subcommands ---

int cmd_simulate(const json& sec, const CliContext& ctx) {
  check_keys(sec, "simulate",
             {"m", "gamma1", "gamma2", "scheme", "activation", "n", "d",
              "label_scale", "data_path", "seed", "threads", "t_max", "dt",
              "record_every", "stop_loss_ratio", "blowup_norm"});
  const std::uint64_t seed =
      ctx.has_seed ? ctx.seed : get_u64(sec, "simulate", "seed", 1);
  const Dataset data = read_dataset(sec, "simulate", seed);
  const ScalingConfig scaling = read_scaling(sec, "simulate", data.d());
  const Activation act = read_activation(sec, "simulate");

  IntegrationSchedule sched;
  sched.t_max =
      as_double(require_key(sec, "simulate", "t_max"), "simulate", "t_max");
  if (!(sched.t_max > 0.0)) {
    throw ConfigError(key_msg("simulate", "t_max") + " must be positive");
  }
  sched.dt = get_double(sec, "simulate", "dt", 0.0);
  if (sched.dt < 0.0) {
    throw ConfigError(key_msg("simulate", "dt") +
                      " must be nonnegative (0 = automatic)");
  }
  sched.record_every = get_size(sec, "simulate", "record_every", 5);
  if (sched.record_every == 0) {
    throw ConfigError(key_msg("simulate", "record_every") +
                      " must be positive");
  }
  sched.stop_loss_ratio = get_double(sec, "simulate", "stop_loss_ratio", 0.0);
  if (sched.stop_loss_ratio < 0.0 || sched.stop_loss_ratio >= 1.0) {
    throw ConfigError(key_msg("simulate", "stop_loss_ratio") +
                      " must lie in [0, 1)");
  }
  sched.blowup_norm = get_double(sec, "simulate", "blowup_norm", 1e6);
  if (!(sched.blowup_norm > 0.0)) {
    throw ConfigError(key_msg("simulate", "blowup_norm") +
                      " must be positive");
  }

  const CondensationDirection direction = compute_direction(data);
  if (sched.dt == 0.0) sched.dt = suggest_step(scaling, direction);

  NormalizedParams params = init_params(scaling.m, data.d(), seed);
  const Trajectory traj =
      integrate(std::move(params), scaling, act, data, sched, seed);

  write_metric_series_csv(join_path(ctx.out_dir, "trajectory.csv"),
                          "trajectory", series_from_summaries(traj));
  write_metric_series_csv(join_path(ctx.out_dir, "metrics.csv"), "metrics",
                          build_series(traj, direction.z_hat));
  save_params(join_path(ctx.out_dir, "params_final.csv"), traj.final_params,
              scaling, seed, act.name(), traj.times.back());
  write_manifest(ctx, "simulate", json(seed),
                 {"trajectory.csv", "metrics.csv", "params_final.csv"},
                 to_string(traj.stop_reason));
  return 0;
}

int cmd_sweep(const json& sec, const CliContext& ctx) {
  check_keys(sec, "sweep",
             {"gamma", "gamma_prime", "widths", "seeds", "fit_mode", "n", "d",
              "label_scale", "activation", "dt", "t_max", "record_every",
              "stop_loss_ratio", "blowup_norm", "rd_lazy_max", "rd_cond_min",
              "ratio_min", "saturation_tol", "adaptive", "threads"});
  const double gamma =
      as_double(require_key(sec, "sweep", "gamma"), "sweep", "gamma");
  const double gamma_prime = as_double(
      require_key(sec, "sweep", "gamma_prime"), "sweep", "gamma_prime");
  const std::vector<std::size_t> widths =
      require_size_array(sec, "sweep", "widths");
  for (std::size_t i = 0; i < widths.size(); ++i) {
    if (widths[i] < 16) {
      throw ConfigError(key_msg("sweep", "widths") +
                        " must contain widths of at least 16");
    }
    if (i > 0 && widths[i] <= widths[i - 1]) {
      throw ConfigError(key_msg("sweep", "widths") +
                        " must be strictly increasing");
    }
  }
  const std::vector<std::uint64_t> seeds = read_seeds(sec, "sweep", ctx);
  const BaseConfig base = read_base_config(sec, "sweep", ctx);

  const std::string mode_name = get_string(sec, "sweep", "fit_mode", "auto");
  ScalingLawMode mode;
  if (mode_name == "w_lag") {
    mode = ScalingLawMode::WLag;
  } else if (mode_name == "a_lag") {
    mode = ScalingLawMode::ALag;
  } else if (mode_name == "auto") {
    mode = classify_regime(gamma, gamma_prime) == RegimeLabel::CondensedALag
               ? ScalingLawMode::ALag
               : ScalingLawMode::WLag;
  } else {
    throw ConfigError(key_msg("sweep", "fit_mode") +
                      " must be one of 'auto', 'w_lag', 'a_lag'");
  }

  const std::vector<SweepRow> rows =
      run_width_sweep(gamma, gamma_prime, widths, seeds, base);
  write_sweep_csv(join_path(ctx.out_dir, "sweep.csv"), rows);

  json fits;
  fits["schema_version"] = kSchemaVersion;
  fits["gamma"] = gamma;
  fits["gamma_prime"] = gamma_prime;
  fits["mode"] = to_string(mode);
  if (widths.size() < 3) {
    fits["refused"] = true;
    fits["reason"] = "need at least three distinct widths";
  } else {
    try {
      const RegressionFit fit = fit_scaling_law(rows, mode);
      fits["refused"] = false;
      fits["fit"] = {{"slope", fit.slope},
                     {"intercept", fit.intercept},
                     {"r_squared", fit.r_squared},
                     {"n_points", fit.n_points}};
    } catch (const HorizonLimited& e) {
      fits["refused"] = true;
      fits["reason"] = e.what();
    } catch (const Error& e) {
      fits["refused"] = true;
      fits["reason"] = e.what();
    }
  }
  write_text_atomic(join_path(ctx.out_dir, "fits.json"), fits.dump(2) + "\n");
  write_manifest(ctx, "sweep", json(seeds), {"sweep.csv", "fits.json"});
  return 0;
}

int cmd_phase_grid(const json& sec, const CliContext& ctx) {
  check_keys(sec, "phase-grid",
             {"gammas", "gamma_primes", "m_probe", "seeds", "n", "d",
              "label_scale", "activation", "dt", "t_max", "record_every",
              "stop_loss_ratio", "blowup_norm", "rd_lazy_max", "rd_cond_min",
              "ratio_min", "saturation_tol", "adaptive", "threads"});
  const std::vector<double> gammas =
      require_double_array(sec, "phase-grid", "gammas");
  const std::vector<double> gamma_primes =
      require_double_array(sec, "phase-grid", "gamma_primes");
  const std::size_t m_probe = as_size(
      require_key(sec, "phase-grid", "m_probe"), "phase-grid", "m_probe");
  if (m_probe < 16) {
    throw ConfigError(key_msg("phase-grid", "m_probe") +
                      " must be at least 16");
  }
  const std::vector<std::uint64_t> seeds = read_seeds(sec, "phase-grid", ctx);
  const BaseConfig base = read_base_config(sec, "phase-grid", ctx);

  const std::vector<PhaseCell> cells =
      run_phase_grid(gammas, gamma_primes, m_probe, seeds, base);
  write_phase_grid_csv(join_path(ctx.out_dir, "phase_grid.csv"), cells);
  write_manifest(ctx, "phase-grid", json(seeds), {"phase_grid.csv"});
  return 0;
}

int cmd_gram(const json& sec, const CliContext& ctx) {
  check_keys(sec, "gram",
             {"m", "gamma1", "gamma2", "scheme", "activation", "n", "d",
              "label_scale", "data_path", "seed", "threads"});
  const std::uint64_t seed =
      ctx.has_seed ? ctx.seed : get_u64(sec, "gram", "seed", 1);
  const Dataset data = read_dataset(sec, "gram", seed);
  const ScalingConfig scaling = read_scaling(sec, "gram", data.d());
  const Activation act = read_activation(sec, "gram");

  const NormalizedParams params = init_params(scaling.m, data.d(), seed);
  const SymmetricMatrix ga = gram_a(params, scaling, act, data);
  const SymmetricMatrix gw = gram_w(params, scaling, act, data);
  write_matrix_csv(join_path(ctx.out_dir, "gram_a.csv"), "gram_a", ga);
  write_matrix_csv(join_path(ctx.out_dir, "gram_w.csv"), "gram_w", gw);

  const SpectralSummary sa = least_eigenvalue(ga);
  const SpectralSummary sw = least_eigenvalue(gw);
  json spectrum;
  spectrum["schema_version"] = kSchemaVersion;
  spectrum["order"] = data.n();
  spectrum["gram_a"] = {{"lambda_min", sa.lambda_min},
                        {"lambda_max", sa.lambda_max},
                        {"residual", sa.residual}};
  spectrum["gram_w"] = {{"lambda_min", sw.lambda_min},
                        {"lambda_max", sw.lambda_max},
                        {"residual", sw.residual}};
  write_text_atomic(join_path(ctx.out_dir, "spectrum.json"),
                    spectrum.dump(2) + "\n");
  write_manifest(ctx, "gram", json(seed),
                 {"gram_a.csv", "gram_w.csv", "spectrum.json"});
  return 0;
}

int cmd_validate(const json& sec, const CliContext& ctx) {
  check_keys(sec, "validate",
             {"activation", "n", "d", "label_scale", "data_path", "seed", "c",
              "threads"});
  const std::uint64_t seed =
      ctx.has_seed ? ctx.seed : get_u64(sec, "validate", "seed", 1);
  const Dataset data = read_dataset(sec, "validate", seed);
  const Activation act = read_activation(sec, "validate");
  const double c = get_double(sec, "validate", "c", 10.0);
  if (!(c > 1.0)) {
    throw ConfigError(key_msg("validate", "c") + " must exceed 1");
  }

  const AssumptionReport rep = validate(data, c);
  json out;
  out["schema_version"] = kSchemaVersion;
  out["dataset"] = {{"n", data.n()},
                    {"d", data.d()},
                    {"digest", dataset_digest(data)},
                    {"nondegenerate_ok", rep.nondegenerate_ok},
                    {"nonparallel_ok", rep.nonparallel_ok},
                    {"norm_bound_c", rep.norm_bound_c},
                    {"violations", rep.violations}};
  json act_report;
  act_report["name"] = act.name();
  try {
    act_report["multiplicity"] = multiplicity(act);
  } catch (const NoMultiplicity&) {
    act_report["multiplicity"] = nullptr;
  }
  json checks = json::array();
  const struct {
    ActivationAssumption which;
    const char* name;
  } kinds[] = {{ActivationAssumption::Multiplicity1, "multiplicity1"},
               {ActivationAssumption::NTKStyle, "ntk_style"}};
  for (const auto& kind : kinds) {
    const ActivationCheck ck = check_assumption(act, kind.which);
    checks.push_back({{"assumption", kind.name},
                      {"pass", ck.pass},
                      {"sup_d1", ck.sup_d1},
                      {"sup_d2", ck.sup_d2},
                      {"findings", ck.findings}});
  }
  act_report["checks"] = checks;
  out["activation"] = act_report;
  write_text_atomic(join_path(ctx.out_dir, "validation.json"),
                    out.dump(2) + "\n");
  write_manifest(ctx, "validate", json(seed), {"validation.json"});
  return 0;
}

int dispatch(const std::string& command, const CliContext& ctx) {
  json cfg;
  try {
    cfg = json::parse(ctx.config_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!cfg.is_object()) {
    throw ConfigError("config root must be a JSON object");
  }
  static const std::set<std::string> kSections = {"simulate", "sweep",
                                                  "phase-grid", "gram",
                                                  "validate"};
  for (const auto& item : cfg.items()) {
    if (kSections.find(item.key()) == kSections.end()) {
      throw ConfigError("unknown top-level config section '" + item.key() +
                        "'");
    }
  }
  const auto it = cfg.find(command);
  if (it == cfg.end()) {
    throw ConfigError("config has no section '" + command + "'");
  }
  if (!it->is_object()) {
    throw ConfigError("config section '" + command + "' must be an object");
  }

  std::error_code ec;
  std::filesystem::create_directories(ctx.out_dir, ec);
  if (ec) {
    throw IoError("cannot create output directory '" + ctx.out_dir +
                  "': " + ec.message());
  }

  if (command == "simulate") return cmd_simulate(*it, ctx);
  if (command == "sweep") return cmd_sweep(*it, ctx);
  if (command == "phase-grid") return cmd_phase_grid(*it, ctx);
  if (command == "gram") return cmd_gram(*it, ctx);
  return cmd_validate(*it, ctx);
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"condlab: two-layer gradient-flow condensation laboratory"};
  app.require_subcommand(1);

  CliContext ctx;
  std::uint64_t seed_flag = 0;
  std::size_t threads_flag = 0;
  app.add_option("--config", ctx.config_path, "Path to the JSON config file")
      ->required();
  app.add_option("--out", ctx.out_dir, "Output directory (default: .)");
  auto* seed_opt =
      app.add_option("--seed", seed_flag, "Override the config seed(s)");
  auto* threads_opt =
      app.add_option("--threads", threads_flag, "Override worker thread count");

  const char* kCommands[] = {"simulate", "sweep", "phase-grid", "gram",
                             "validate"};
  const char* kDescriptions[] = {
      "Integrate one training flow and export its trajectory",
      "Run a width ladder and fit the T-hat scaling law",
      "Map empirical regimes over a (gamma, gamma') grid",
      "Export the finite-width kernel matrices and their spectra",
      "Check dataset and activation assumptions"};
  for (std::size_t i = 0; i < 5; ++i) {
    auto* sub = app.add_subcommand(kCommands[i], kDescriptions[i]);
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  ctx.has_seed = seed_opt->count() > 0;
  ctx.seed = seed_flag;
  ctx.has_threads = threads_opt->count() > 0;
  ctx.threads = threads_flag;

  std::string command;
  for (const char* name : kCommands) {
    if (app.got_subcommand(name)) command = name;
  }

  try {
    {
      std::ifstream in(ctx.config_path, std::ios::binary);
      if (!in) {
        throw ConfigError("cannot open config file '" + ctx.config_path + "'");
      }
      std::ostringstream buf;
      buf << in.rdbuf();
      ctx.config_text = buf.str();
    }
    return dispatch(command, ctx);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 1;
  } catch (const Error& e) {
    std::fprintf(stderr, "numerical abort: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 1;
  }
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("condlab");
  for (const std::string& a : args) storage.push_back(a);
  std::vector<char*> argv;
  argv.reserve(storage.size());
  for (std::string& s : storage) argv.push_back(s.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace condlab
