// Copyright 2026 The nqslab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Subcommands: ed, learn, entropy, scaling, report.
//
// Precedence for every setting: explicit flag > config-file section > config
// top level > built-in default. The manifest written next to the outputs
// embeds the fully resolved configuration, so re-running with
// `--config manifest.json` reproduces the outputs byte for byte (the
// manifest's own timestamp is the only field that varies).

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <exception>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nqslab/basis.hpp"
#include "nqslab/errors.hpp"
#include "nqslab/exact.hpp"
#include "nqslab/experiments.hpp"
#include "nqslab/io.hpp"
#include "nqslab/models.hpp"
#include "nqslab/optimize.hpp"
#include "nqslab/rng.hpp"

namespace {

using nlohmann::json;
using namespace nqslab;

std::string timestamp_iso() {
  const std::time_t now = std::time(nullptr);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buffer;
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

bool given(const CLI::Option* opt) { return opt != nullptr && opt->count() > 0; }

template <typename T>
T json_get(const json& j, const char* key, const char* ctx) {
  try {
    return j.at(key).get<T>();
  } catch (const std::exception&) {
    throw ConfigError(std::string(ctx) + ": bad value for '" + key + "'");
  }
}

template <typename T>
T pick(const CLI::Option* opt, const T& flag_value, const json& section, const char* key,
       const T& fallback, const char* ctx) {
  if (given(opt)) return flag_value;
  if (section.is_object() && section.contains(key)) return json_get<T>(section, key, ctx);
  return fallback;
}

// --- common flags ------------------------------------------------------------

struct Common {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  int threads = 1;
  CLI::Option* config_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
  json file = json::object();     // whole config file
  json section = json::object();  // this command's section
};

void add_common_flags(CLI::App* cmd, Common& c) {
  c.config_opt = cmd->add_option("--config", c.config_path,
                                 "JSON config file (a manifest.json also works)");
  c.out_opt = cmd->add_option("--out", c.out_dir, "output directory");
  c.seed_opt = cmd->add_option("--seed", c.seed, "master seed");
  c.threads_opt = cmd->add_option("--threads", c.threads, "worker threads over realizations");
}

/// Loads the config file (if any) and applies top-level fallbacks.
void load_config(Common& c, const char* command) {
  if (!c.config_path.empty()) {
    json j = json::parse(read_text_file(c.config_path), nullptr, false);
    if (j.is_discarded()) throw ConfigError("config: malformed JSON in " + c.config_path);
    if (j.is_object() && j.contains("command") && j.contains("config")) {
      j = j["config"];  // manifest re-ingestion
    }
    if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
    c.file = j;
    if (j.contains(command) && j[command].is_object()) c.section = j[command];
    if (!given(c.seed_opt) && j.contains("seed")) {
      c.seed = json_get<std::uint64_t>(j, "seed", command);
    }
    if (!given(c.out_opt) && j.contains("out")) {
      c.out_dir = json_get<std::string>(j, "out", command);
    }
    if (!given(c.threads_opt) && j.contains("threads")) {
      c.threads = json_get<int>(j, "threads", command);
    }
  }
  if (c.threads < 1) throw ConfigError("threads must be >= 1");
}

void write_manifest(const Common& c, const std::string& command, const json& resolved,
                    const std::vector<std::string>& outputs) {
  const std::vector<OutputHash> hashes = hash_files(c.out_dir, outputs);
  write_text_file(join_path(c.out_dir, "manifest.json"),
                  manifest_to_json(command, resolved.dump(), c.seed, hashes, timestamp_iso()));
}

json common_resolved(const Common& c) {
  return {{"seed", c.seed}, {"out", c.out_dir}, {"threads", c.threads}};
}

// --- training-config flags -----------------------------------------------------

struct TrainFlags {
  TrainConfig v;  // flag storage; defaults mirror TrainConfig's
  CLI::Option* max_steps = nullptr;
  CLI::Option* lr = nullptr;
  CLI::Option* lr_decay = nullptr;
  CLI::Option* beta1 = nullptr;
  CLI::Option* beta2 = nullptr;
  CLI::Option* eps = nullptr;
  CLI::Option* target = nullptr;
  CLI::Option* patience = nullptr;
  CLI::Option* restarts = nullptr;
  CLI::Option* stride = nullptr;
  CLI::Option* init_scale = nullptr;
  CLI::Option* min_impr = nullptr;
};

void add_train_flags(CLI::App* cmd, TrainFlags& f) {
  f.max_steps = cmd->add_option("--max-steps", f.v.max_steps, "Adam step cap");
  f.lr = cmd->add_option("--lr", f.v.learning_rate, "Adam learning rate");
  f.lr_decay = cmd->add_option("--lr-decay", f.v.lr_decay, "per-step learning-rate decay");
  f.beta1 = cmd->add_option("--adam-beta1", f.v.adam_beta1, "Adam first-moment decay");
  f.beta2 = cmd->add_option("--adam-beta2", f.v.adam_beta2, "Adam second-moment decay");
  f.eps = cmd->add_option("--adam-eps", f.v.adam_eps, "Adam epsilon");
  f.target = cmd->add_option("--target-infidelity", f.v.target_infidelity,
                             "early-stop infidelity threshold");
  f.patience = cmd->add_option("--patience", f.v.patience, "steps without improvement");
  f.restarts = cmd->add_option("--restarts", f.v.restarts, "independent init seeds");
  f.stride = cmd->add_option("--trace-stride", f.v.trace_stride, "steps between trace rows");
  f.init_scale = cmd->add_option("--init-scale", f.v.init_scale, "init std multiplier");
  f.min_impr = cmd->add_option("--min-rel-improvement", f.v.min_rel_improvement,
                               "relative drop that resets patience");
}

TrainConfig resolve_train(const TrainFlags& f, const json& section, const char* ctx) {
  const json t = section.is_object() && section.contains("train") && section["train"].is_object()
                     ? section["train"]
                     : json::object();
  TrainConfig cfg;
  cfg.max_steps = pick(f.max_steps, f.v.max_steps, t, "max_steps", cfg.max_steps, ctx);
  cfg.learning_rate = pick(f.lr, f.v.learning_rate, t, "learning_rate", cfg.learning_rate, ctx);
  cfg.lr_decay = pick(f.lr_decay, f.v.lr_decay, t, "lr_decay", cfg.lr_decay, ctx);
  cfg.adam_beta1 = pick(f.beta1, f.v.adam_beta1, t, "adam_beta1", cfg.adam_beta1, ctx);
  cfg.adam_beta2 = pick(f.beta2, f.v.adam_beta2, t, "adam_beta2", cfg.adam_beta2, ctx);
  cfg.adam_eps = pick(f.eps, f.v.adam_eps, t, "adam_eps", cfg.adam_eps, ctx);
  cfg.target_infidelity =
      pick(f.target, f.v.target_infidelity, t, "target_infidelity", cfg.target_infidelity, ctx);
  cfg.patience = pick(f.patience, f.v.patience, t, "patience", cfg.patience, ctx);
  cfg.restarts = pick(f.restarts, f.v.restarts, t, "restarts", cfg.restarts, ctx);
  cfg.trace_stride = pick(f.stride, f.v.trace_stride, t, "trace_stride", cfg.trace_stride, ctx);
  cfg.init_scale = pick(f.init_scale, f.v.init_scale, t, "init_scale", cfg.init_scale, ctx);
  cfg.min_rel_improvement = pick(f.min_impr, f.v.min_rel_improvement, t, "min_rel_improvement",
                                 cfg.min_rel_improvement, ctx);
  cfg.validate();
  return cfg;
}

DisorderRealization load_or_sample_disorder(const std::string& fixture, int L, double sigma,
                                            std::uint64_t seed) {
  if (!fixture.empty()) {
    DisorderRealization d = disorder_from_json(read_text_file(fixture));
    if (L > 0 && d.L != L) {
      throw ConfigError("disorder fixture is for L = " + std::to_string(d.L) +
                        ", requested L = " + std::to_string(L));
    }
    return d;
  }
  if (L < 1) throw ConfigError("L is required (flag or config)");
  return sigma > 0.0 ? sample_disorder(L, seed, sigma) : sample_disorder(L, seed);
}

// --- ed ------------------------------------------------------------------------

struct EdFlags {
  Common common;
  std::string model;
  int L = 0;
  int N = -1;
  double h = 1.0;
  double sigma = 0.0;
  std::string disorder_path;
  CLI::Option *model_opt, *l_opt, *n_opt, *h_opt, *sigma_opt, *disorder_opt;
};

void run_ed(EdFlags& f) {
  Common& c = f.common;
  load_config(c, "ed");
  const std::string model_name =
      pick(f.model_opt, f.model, c.section, "model", std::string(), "ed");
  if (model_name.empty()) throw ConfigError("ed: model is required (qsk or df)");
  const ModelKind model = model_kind_from_string(model_name);
  int L = pick(f.l_opt, f.L, c.section, "L", 0, "ed");
  const double h = pick(f.h_opt, f.h, c.section, "h", 1.0, "ed");
  const double sigma = pick(f.sigma_opt, f.sigma, c.section, "sigma", 0.0, "ed");
  const std::string fixture =
      pick(f.disorder_opt, f.disorder_path, c.section, "disorder", std::string(), "ed");

  const std::uint64_t disorder_seed = derive_seed(c.seed, 0);
  const DisorderRealization disorder = load_or_sample_disorder(fixture, L, sigma, disorder_seed);
  L = disorder.L;
  int N = pick(f.n_opt, f.N, c.section, "N", -1, "ed");
  if (model == ModelKind::kDf && N < 0) N = L / 2;

  GroundState gs;
  Eigen::VectorXd full;
  if (model == ModelKind::kQsk) {
    if (!(h >= 0.0)) throw ConfigError("ed: QSK needs h >= 0");
    const SpinBasis basis = enumerate_spin_basis(L);
    gs = ground_state(build_qsk({h, disorder.J}, basis));
    full = gs.amplitudes;
  } else {
    const FermionSector sector = enumerate_sector(L, N);
    gs = ground_state(build_df(disorder, sector));
    full = embed_sector_vector(gs.amplitudes, sector);
  }
  const double s2 = renyi2_entropy(full, max_bipartition(L)).s2;

  write_text_file(join_path(c.out_dir, "disorder.json"), disorder_to_json(disorder));
  write_text_file(join_path(c.out_dir, "ground_state.json"), ground_state_to_json(gs));

  json resolved = common_resolved(c);
  resolved["ed"] = {{"model", model_name}, {"L", L},         {"N", N},
                    {"h", h},              {"sigma", sigma}, {"disorder", fixture}};
  write_manifest(c, "ed", resolved, {"disorder.json", "ground_state.json"});

  std::printf("E0 = %.12g\n", gs.energy);
  std::printf("S2(max bipartition) = %.12g\n", s2);
}

// --- learn -----------------------------------------------------------------------

struct LearnFlags {
  Common common;
  TrainFlags train;
  std::string model;
  std::string ansatz = "mlp";
  int L = 0;
  int N = -1;
  double alpha = 2.0;
  int width = 0;
  double h = 1.0;
  double sigma = 0.0;
  bool v_zero = false;
  std::string disorder_path;
  CLI::Option *model_opt, *ansatz_opt, *l_opt, *n_opt, *alpha_opt, *width_opt, *h_opt,
      *sigma_opt, *v_zero_opt, *disorder_opt;
};

void run_learn(LearnFlags& f) {
  Common& c = f.common;
  load_config(c, "learn");
  const std::string model_name =
      pick(f.model_opt, f.model, c.section, "model", std::string(), "learn");
  if (model_name.empty()) throw ConfigError("learn: model is required (qsk or df)");
  const ModelKind model = model_kind_from_string(model_name);
  const std::string ansatz_name =
      pick(f.ansatz_opt, f.ansatz, c.section, "ansatz", std::string("mlp"), "learn");
  const AnsatzKind ansatz = ansatz_kind_from_string(ansatz_name);
  int L = pick(f.l_opt, f.L, c.section, "L", 0, "learn");
  const double alpha = pick(f.alpha_opt, f.alpha, c.section, "alpha", 2.0, "learn");
  const int width = pick(f.width_opt, f.width, c.section, "width", 0, "learn");
  const double h = pick(f.h_opt, f.h, c.section, "h", 1.0, "learn");
  const double sigma = pick(f.sigma_opt, f.sigma, c.section, "sigma", 0.0, "learn");
  const bool v_zero = pick(f.v_zero_opt, f.v_zero, c.section, "v_zero", false, "learn");
  const std::string fixture =
      pick(f.disorder_opt, f.disorder_path, c.section, "disorder", std::string(), "learn");
  const TrainConfig train = resolve_train(f.train, c.section, "learn");

  if (model == ModelKind::kQsk && ansatz == AnsatzKind::kBackflow) {
    throw ConfigError("learn: backflow requires a fermionic sector (model df)");
  }
  if (v_zero && model != ModelKind::kDf) throw ConfigError("learn: v_zero needs model df");

  const std::uint64_t disorder_seed = derive_seed(c.seed, 0);
  DisorderRealization disorder = load_or_sample_disorder(fixture, L, sigma, disorder_seed);
  L = disorder.L;
  if (v_zero) disorder.V.setZero();
  int N = pick(f.n_opt, f.N, c.section, "N", -1, "learn");
  if (model == ModelKind::kDf && N < 0) N = L / 2;

  const int hidden = width > 0 ? width : std::max(1, static_cast<int>(std::llround(alpha * L)));
  MlpSpec mlp_spec;
  mlp_spec.L = L;
  mlp_spec.alpha = static_cast<double>(hidden) / L;

  std::unique_ptr<WavefunctionModel> wavefunction;
  std::optional<HamiltonianOperator> op;
  if (model == ModelKind::kQsk) {
    if (!(h >= 0.0)) throw ConfigError("learn: QSK needs h >= 0");
    const SpinBasis basis = enumerate_spin_basis(L);
    op.emplace(build_qsk({h, disorder.J}, basis));
    wavefunction = std::make_unique<MlpModel>(mlp_spec, basis);
  } else {
    const FermionSector sector = enumerate_sector(L, N);
    op.emplace(build_df(disorder, sector));
    if (ansatz == AnsatzKind::kMlp) {
      wavefunction = std::make_unique<MlpModel>(mlp_spec, sector);
    } else {
      BackflowSpec spec;
      spec.L = L;
      spec.N = N;
      spec.hidden = hidden;
      spec.reference_orbitals = hartree_fock_orbitals(disorder.J, N);
      wavefunction = std::make_unique<BackflowModel>(std::move(spec), sector);
    }
  }

  const GroundState target = ground_state(*op);
  const std::uint64_t train_seed = derive_seed(disorder_seed, 1);

  json record;
  bool excluded = false;
  try {
    const TrainResult result = train_fidelity(*wavefunction, target, *op, train, train_seed);
    record = json::parse(train_result_to_json(result));
    write_trace_csv(join_path(c.out_dir, "trace.csv"), result.trace);
    std::printf("final infidelity = %.6g\n", result.final_infidelity);
    std::printf("relative energy error = %.6g\n", result.relative_energy_error);
    std::printf("steps used = %lld (restarts %d)\n", result.steps_used, result.restarts_used);
  } catch (const ExcludedRealizationError& e) {
    excluded = true;
    record = json::object();
    write_trace_csv(join_path(c.out_dir, "trace.csv"), {});
    std::printf("realization excluded: %s\n", e.what());
  }
  record["excluded"] = excluded;
  record["model"] = model_name;
  record["ansatz"] = ansatz_name;
  record["L"] = L;
  record["N"] = model == ModelKind::kDf ? N : -1;
  record["width"] = hidden;
  record["alpha"] = static_cast<double>(hidden) / L;
  record["parameter_count"] = wavefunction->parameter_count();
  record["disorder_seed"] = disorder_seed;
  record["train_seed"] = train_seed;
  record["target_energy"] = target.energy;

  write_text_file(join_path(c.out_dir, "disorder.json"), disorder_to_json(disorder));
  write_text_file(join_path(c.out_dir, "result.json"), record.dump(2) + "\n");

  json resolved = common_resolved(c);
  resolved["learn"] = {{"model", model_name},
                       {"ansatz", ansatz_name},
                       {"L", L},
                       {"N", N},
                       {"alpha", alpha},
                       {"width", width},
                       {"h", h},
                       {"sigma", sigma},
                       {"v_zero", v_zero},
                       {"disorder", fixture},
                       {"train", json::parse(train_config_to_json(train))}};
  write_manifest(c, "learn", resolved, {"disorder.json", "result.json", "trace.csv"});
}

// --- entropy ---------------------------------------------------------------------

struct EntropyFlags {
  Common common;
  std::string model;
  std::vector<int> sizes;
  int n = 10;
  double h = 1.0;
  bool zero_couplings = false;
  CLI::Option *model_opt, *sizes_opt, *n_opt, *h_opt, *zero_opt;
};

void run_entropy(EntropyFlags& f) {
  Common& c = f.common;
  load_config(c, "entropy");
  const std::string model_name =
      pick(f.model_opt, f.model, c.section, "model", std::string(), "entropy");
  if (model_name.empty()) throw ConfigError("entropy: model is required (qsk or df)");
  const ModelKind model = model_kind_from_string(model_name);
  const std::vector<int> sizes =
      pick(f.sizes_opt, f.sizes, c.section, "Ls", std::vector<int>{}, "entropy");
  const int n = pick(f.n_opt, f.n, c.section, "n", 10, "entropy");
  const double h = pick(f.h_opt, f.h, c.section, "h", 1.0, "entropy");
  const bool zero = pick(f.zero_opt, f.zero_couplings, c.section, "zero_couplings", false,
                         "entropy");
  if (sizes.empty()) throw InsufficientDataError("entropy: empty size grid");

  const EntropyScan scan = entropy_scan(model, sizes, n, c.seed, h, zero, c.threads);
  write_fig_d_csv(join_path(c.out_dir, "fig_d.csv"), {scan});
  write_text_file(join_path(c.out_dir, "entropy.json"), entropy_scan_to_json(scan));

  json resolved = common_resolved(c);
  resolved["entropy"] = {{"model", model_name},
                         {"Ls", sizes},
                         {"n", n},
                         {"h", h},
                         {"zero_couplings", zero}};
  write_manifest(c, "entropy", resolved, {"fig_d.csv", "entropy.json"});

  std::printf("S2 fit: slope = %.6g, intercept = %.6g, R^2 = %.6g\n", scan.slope,
              scan.intercept, scan.r2);
}

// --- scaling ---------------------------------------------------------------------

struct ScalingFlags {
  Common common;
  TrainFlags train;
  std::string model = "df";
  std::string ansatz;
  std::vector<int> sizes;
  std::vector<int> extrapolate;
  double target = 1e-2;
  int width_lo = 1;
  int width_hi = 64;
  int n = 10;
  CLI::Option *model_opt, *ansatz_opt, *sizes_opt, *extrap_opt, *target_opt, *lo_opt, *hi_opt,
      *n_opt;
};

void run_scaling(ScalingFlags& f) {
  Common& c = f.common;
  load_config(c, "scaling");
  const std::string model_name =
      pick(f.model_opt, f.model, c.section, "model", std::string("df"), "scaling");
  const ModelKind model = model_kind_from_string(model_name);
  const std::string ansatz_name =
      pick(f.ansatz_opt, f.ansatz, c.section, "ansatz", std::string(), "scaling");
  if (ansatz_name.empty()) throw ConfigError("scaling: ansatz is required (mlp or backflow)");
  const AnsatzKind ansatz = ansatz_kind_from_string(ansatz_name);
  const std::vector<int> sizes =
      pick(f.sizes_opt, f.sizes, c.section, "Ls", std::vector<int>{}, "scaling");
  const std::vector<int> extrapolate =
      pick(f.extrap_opt, f.extrapolate, c.section, "extrapolate", std::vector<int>{}, "scaling");
  const double target = pick(f.target_opt, f.target, c.section, "target_error", 1e-2, "scaling");
  const int width_lo = pick(f.lo_opt, f.width_lo, c.section, "width_lo", 1, "scaling");
  const int width_hi = pick(f.hi_opt, f.width_hi, c.section, "width_hi", 64, "scaling");
  const int n = pick(f.n_opt, f.n, c.section, "n", 10, "scaling");
  const TrainConfig train = resolve_train(f.train, c.section, "scaling");
  if (sizes.empty()) throw InsufficientDataError("scaling: empty size grid");

  std::vector<ScalingRow> rows;
  std::vector<ScalingPoint> points;
  for (const int L : sizes) {
    const ScalingPoint point = min_params_for_error(model, ansatz, L, target, c.seed, width_lo,
                                                    width_hi, train, n, c.threads);
    points.push_back(point);
    rows.push_back({model, ansatz, point});
    if (point.unbounded) {
      std::printf("L = %d: unbounded at width cap %d (error %.3e)\n", L, point.width,
                  point.achieved_error);
    } else {
      std::printf("L = %d: min_params = %lld (width %d, error %.3e)\n", L,
                  point.min_parameters, point.width, point.achieved_error);
    }
  }

  json report;
  report["model"] = model_name;
  report["ansatz"] = ansatz_name;
  report["target_error"] = target;
  report["points"] = json::array();
  for (const ScalingPoint& p : points) {
    report["points"].push_back({{"L", p.L},
                                {"width", p.width},
                                {"min_parameters", p.min_parameters},
                                {"achieved_error", p.achieved_error},
                                {"extrapolated", p.extrapolated},
                                {"unbounded", p.unbounded}});
  }

  int bounded = 0;
  for (const ScalingPoint& p : points) {
    if (!p.unbounded) ++bounded;
  }
  if (bounded >= 3) {
    const ScalingFit fit = fit_scaling(points);
    report["fit"] = json::parse(scaling_fit_to_json(fit));
    for (const int L : extrapolate) {
      const ScalingPoint p = extrapolate_params(fit, L);
      rows.push_back({model, ansatz, p});
      report["points"].push_back({{"L", p.L},
                                  {"width", p.width},
                                  {"min_parameters", p.min_parameters},
                                  {"achieved_error", p.achieved_error},
                                  {"extrapolated", p.extrapolated},
                                  {"unbounded", p.unbounded}});
    }
    std::printf("preferred scaling: %s\n", fit.prefer_power ? "power" : "exponential");
  } else {
    report["fit"] = nullptr;
    std::printf("preferred scaling: undetermined (%d bounded point%s)\n", bounded,
                bounded == 1 ? "" : "s");
  }

  write_fig_c_csv(join_path(c.out_dir, "fig_c.csv"), rows);
  write_text_file(join_path(c.out_dir, "scaling.json"), report.dump(2) + "\n");

  json resolved = common_resolved(c);
  resolved["scaling"] = {{"model", model_name},
                         {"ansatz", ansatz_name},
                         {"Ls", sizes},
                         {"extrapolate", extrapolate},
                         {"target_error", target},
                         {"width_lo", width_lo},
                         {"width_hi", width_hi},
                         {"n", n},
                         {"train", json::parse(train_config_to_json(train))}};
  write_manifest(c, "scaling", resolved, {"fig_c.csv", "scaling.json"});
}

// --- report ----------------------------------------------------------------------

struct ReportFlags {
  Common common;
  TrainFlags train;
  std::vector<int> qsk_sizes;
  std::vector<int> df_sizes;
  double alpha = 2.0;
  int n = 10;
  CLI::Option *qsk_opt, *df_opt, *alpha_opt, *n_opt;
};

void run_report(ReportFlags& f) {
  Common& c = f.common;
  load_config(c, "report");
  const std::vector<int> qsk_sizes =
      pick(f.qsk_opt, f.qsk_sizes, c.section, "qsk_Ls", std::vector<int>{4, 6, 8, 10}, "report");
  const std::vector<int> df_sizes =
      pick(f.df_opt, f.df_sizes, c.section, "df_Ls", std::vector<int>{4, 6, 8}, "report");
  const double alpha = pick(f.alpha_opt, f.alpha, c.section, "alpha", 2.0, "report");
  const int n = pick(f.n_opt, f.n, c.section, "n", 10, "report");
  const TrainConfig train = resolve_train(f.train, c.section, "report");

  std::vector<EnsembleSummary> rows;
  const auto run = [&](ModelKind model, AnsatzKind ansatz, int L) {
    EnsembleRequest request;
    request.model = model;
    request.ansatz = ansatz;
    request.L = L;
    request.alpha = alpha;
    request.n_realizations = n;
    request.threads = c.threads;
    const EnsembleSummary s = run_ensemble(request, c.seed, train);
    std::printf("%s %s L=%d: mean infidelity %.3e (sem %.1e), mean rel err %.3e, %d/%d below "
                "target\n",
                to_string(model), to_string(ansatz), L, s.mean_infidelity, s.sem_infidelity,
                s.mean_rel_err, s.n_below_target, s.n_included);
    rows.push_back(s);
  };
  for (const int L : qsk_sizes) run(ModelKind::kQsk, AnsatzKind::kMlp, L);
  for (const int L : df_sizes) run(ModelKind::kDf, AnsatzKind::kBackflow, L);
  for (const int L : df_sizes) run(ModelKind::kDf, AnsatzKind::kMlp, L);

  write_fig_a_csv(join_path(c.out_dir, "fig_a.csv"), rows);
  write_fig_b_csv(join_path(c.out_dir, "fig_b.csv"), rows);
  json report = json::array();
  for (const EnsembleSummary& s : rows) report.push_back(json::parse(ensemble_to_json(s)));
  write_text_file(join_path(c.out_dir, "report.json"), report.dump(2) + "\n");

  json resolved = common_resolved(c);
  resolved["report"] = {{"qsk_Ls", qsk_sizes},
                        {"df_Ls", df_sizes},
                        {"alpha", alpha},
                        {"n", n},
                        {"train", json::parse(train_config_to_json(train))}};
  write_manifest(c, "report", resolved, {"fig_a.csv", "fig_b.csv", "report.json"});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nqslab: neural-quantum-state learnability laboratory"};
  app.require_subcommand(1);

  EdFlags ed;
  CLI::App* ed_cmd = app.add_subcommand("ed", "exact diagonalization of one realization");
  add_common_flags(ed_cmd, ed.common);
  ed.model_opt = ed_cmd->add_option("--model", ed.model, "qsk or df");
  ed.l_opt = ed_cmd->add_option("--L", ed.L, "site count");
  ed.n_opt = ed_cmd->add_option("--N", ed.N, "particle number (df; default L/2)");
  ed.h_opt = ed_cmd->add_option("--field", ed.h, "QSK transverse field h");
  ed.sigma_opt = ed_cmd->add_option("--sigma", ed.sigma, "coupling std (default 1/sqrt(L))");
  ed.disorder_opt = ed_cmd->add_option("--disorder", ed.disorder_path, "coupling fixture JSON");
  ed_cmd->callback([&ed] { run_ed(ed); });

  LearnFlags learn;
  CLI::App* learn_cmd = app.add_subcommand("learn", "fidelity-optimize one realization");
  add_common_flags(learn_cmd, learn.common);
  learn.model_opt = learn_cmd->add_option("--model", learn.model, "qsk or df");
  learn.ansatz_opt = learn_cmd->add_option("--ansatz", learn.ansatz, "mlp or backflow");
  learn.l_opt = learn_cmd->add_option("--L", learn.L, "site count");
  learn.n_opt = learn_cmd->add_option("--N", learn.N, "particle number (df; default L/2)");
  learn.alpha_opt = learn_cmd->add_option("--alpha", learn.alpha, "hidden-unit density");
  learn.width_opt = learn_cmd->add_option("--width", learn.width, "hidden width (overrides alpha)");
  learn.h_opt = learn_cmd->add_option("--field", learn.h, "QSK transverse field h");
  learn.sigma_opt = learn_cmd->add_option("--sigma", learn.sigma, "coupling std");
  learn.v_zero_opt = learn_cmd->add_flag("--v-zero", learn.v_zero, "force V = 0 (df)");
  learn.disorder_opt =
      learn_cmd->add_option("--disorder", learn.disorder_path, "coupling fixture JSON");
  add_train_flags(learn_cmd, learn.train);
  learn_cmd->callback([&learn] { run_learn(learn); });

  EntropyFlags entropy;
  CLI::App* entropy_cmd = app.add_subcommand("entropy", "ground-state Renyi-2 entropy scan");
  add_common_flags(entropy_cmd, entropy.common);
  entropy.model_opt = entropy_cmd->add_option("--model", entropy.model, "qsk or df");
  entropy.sizes_opt =
      entropy_cmd->add_option("--Ls", entropy.sizes, "site counts")->delimiter(',');
  entropy.n_opt = entropy_cmd->add_option("--n", entropy.n, "realizations per size");
  entropy.h_opt = entropy_cmd->add_option("--field", entropy.h, "QSK transverse field h");
  entropy.zero_opt = entropy_cmd->add_flag("--zero-couplings", entropy.zero_couplings,
                                           "zero J (QSK product-state control)");
  entropy_cmd->callback([&entropy] { run_entropy(entropy); });

  ScalingFlags scaling;
  CLI::App* scaling_cmd =
      app.add_subcommand("scaling", "minimum parameters to reach a target energy error");
  add_common_flags(scaling_cmd, scaling.common);
  scaling.model_opt = scaling_cmd->add_option("--model", scaling.model, "qsk or df");
  scaling.ansatz_opt = scaling_cmd->add_option("--ansatz", scaling.ansatz, "mlp or backflow");
  scaling.sizes_opt =
      scaling_cmd->add_option("--Ls", scaling.sizes, "site counts")->delimiter(',');
  scaling.extrap_opt =
      scaling_cmd->add_option("--extrapolate", scaling.extrapolate, "sizes to extrapolate")
          ->delimiter(',');
  scaling.target_opt =
      scaling_cmd->add_option("--target", scaling.target, "relative energy error target");
  scaling.lo_opt = scaling_cmd->add_option("--width-lo", scaling.width_lo, "width lower bound");
  scaling.hi_opt = scaling_cmd->add_option("--width-hi", scaling.width_hi, "width cap");
  scaling.n_opt = scaling_cmd->add_option("--n", scaling.n, "realizations per width");
  add_train_flags(scaling_cmd, scaling.train);
  scaling_cmd->callback([&scaling] { run_scaling(scaling); });

  ReportFlags report;
  CLI::App* report_cmd =
      app.add_subcommand("report", "ensemble tables for the infidelity and energy panels");
  add_common_flags(report_cmd, report.common);
  report.qsk_opt =
      report_cmd->add_option("--qsk-Ls", report.qsk_sizes, "QSK site counts")->delimiter(',');
  report.df_opt =
      report_cmd->add_option("--df-Ls", report.df_sizes, "DF site counts")->delimiter(',');
  report.alpha_opt = report_cmd->add_option("--alpha", report.alpha, "hidden-unit density");
  report.n_opt = report_cmd->add_option("--n", report.n, "realizations per point");
  add_train_flags(report_cmd, report.train);
  report_cmd->callback([&report] { run_report(report); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 3;
  }
  return 0;
}
