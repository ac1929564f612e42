// Copyright 2026 The nqslab Authors
// SPDX-License-Identifier: Apache-2.0

#include "nqslab/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nqslab/errors.hpp"

namespace nqslab {

namespace {

using nlohmann::json;

json parse_or_throw(const std::string& text, const char* what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ConfigError(std::string(what) + ": malformed JSON");
  return j;
}

json upper_triangle(const Eigen::MatrixXd& m) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) arr.push_back(m(i, j));
  }
  return arr;
}

Eigen::MatrixXd from_upper_triangle(const json& arr, int L, const char* name) {
  const std::size_t expected = static_cast<std::size_t>(L) * (L - 1) / 2;
  if (!arr.is_array() || arr.size() != expected) {
    throw ConfigError(std::string("disorder: ") + name + " must hold L(L-1)/2 entries");
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(L, L);
  std::size_t k = 0;
  for (int i = 0; i < L; ++i) {
    for (int j = i + 1; j < L; ++j) {
      if (!arr[k].is_number()) {
        throw ConfigError(std::string("disorder: ") + name + " entries must be numbers");
      }
      m(i, j) = arr[k].get<double>();
      m(j, i) = m(i, j);
      ++k;
    }
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

json trace_to_json(const std::vector<TracePoint>& trace) {
  json arr = json::array();
  for (const TracePoint& p : trace) {
    arr.push_back({{"step", p.step},
                   {"infidelity", p.infidelity},
                   {"rel_energy_error", p.rel_energy_error}});
  }
  return arr;
}

json fit_line_to_json(const FitLine& line) {
  return {{"intercept", line.intercept},
          {"slope", line.slope},
          {"rss", line.rss},
          {"aic", line.aic}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 14695981039346656037ull;
  for (const char c : bytes) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, std::string_view content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
    if (ec) throw ConfigError("cannot create directory: " + p.parent_path().string());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open file for writing: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw ConfigError("write failed: " + path);
}

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string disorder_to_json(const DisorderRealization& disorder) {
  const json j = {{"L", disorder.L},
                  {"seed", disorder.seed},
                  {"sigma", disorder.sigma},
                  {"j_upper", upper_triangle(disorder.J)},
                  {"v_upper", upper_triangle(disorder.V)}};
  return dump(j);
}

DisorderRealization disorder_from_json(const std::string& text) {
  const json j = parse_or_throw(text, "disorder");
  if (!j.is_object() || !j.contains("L") || !j["L"].is_number_integer()) {
    throw ConfigError("disorder: need an object with integer L");
  }
  DisorderRealization d;
  d.L = j["L"].get<int>();
  if (d.L < 1 || d.L > kMaxSites) throw ConfigError("disorder: L out of range");
  if (!j.contains("j_upper")) throw ConfigError("disorder: j_upper is required");
  d.J = from_upper_triangle(j["j_upper"], d.L, "j_upper");
  d.V = j.contains("v_upper") ? from_upper_triangle(j["v_upper"], d.L, "v_upper")
                              : Eigen::MatrixXd::Zero(d.L, d.L);
  d.seed = j.value("seed", std::uint64_t{0});
  d.sigma = j.value("sigma", 0.0);
  return d;
}

std::string ground_state_to_json(const GroundState& gs) {
  const json j = {{"energy", gs.energy},
                  {"basis", gs.basis_tag == BasisTag::kSpinFull ? "spin_full" : "fermion_sector"},
                  {"L", gs.L},
                  {"N", gs.N},
                  {"amplitudes", vector_to_json(gs.amplitudes)}};
  return dump(j);
}

std::string train_config_to_json(const TrainConfig& config) {
  const json j = {{"max_steps", config.max_steps},
                  {"learning_rate", config.learning_rate},
                  {"lr_decay", config.lr_decay},
                  {"adam_beta1", config.adam_beta1},
                  {"adam_beta2", config.adam_beta2},
                  {"adam_eps", config.adam_eps},
                  {"target_infidelity", config.target_infidelity},
                  {"patience", config.patience},
                  {"restarts", config.restarts},
                  {"trace_stride", config.trace_stride},
                  {"init_scale", config.init_scale},
                  {"min_rel_improvement", config.min_rel_improvement}};
  return dump(j);
}

std::string train_result_to_json(const TrainResult& result) {
  const json j = {{"final_infidelity", result.final_infidelity},
                  {"final_energy", result.final_energy},
                  {"relative_energy_error", result.relative_energy_error},
                  {"steps_used", result.steps_used},
                  {"restarts_used", result.restarts_used},
                  {"best_parameters", vector_to_json(result.best_parameters)},
                  {"trace", trace_to_json(result.trace)}};
  return dump(j);
}

std::string ensemble_to_json(const EnsembleSummary& summary) {
  json outcomes = json::array();
  for (const RealizationOutcome& o : summary.outcomes) {
    outcomes.push_back({{"seed", o.seed},
                        {"infidelity", o.infidelity},
                        {"rel_energy_error", o.rel_energy_error},
                        {"energy", o.energy},
                        {"target_energy", o.target_energy},
                        {"steps_used", o.steps_used},
                        {"excluded", o.excluded}});
  }
  const json j = {{"model", to_string(summary.model)},
                  {"ansatz", to_string(summary.ansatz)},
                  {"L", summary.L},
                  {"N", summary.N},
                  {"alpha", summary.alpha},
                  {"width", summary.width},
                  {"parameter_count", summary.parameter_count},
                  {"master_seed", summary.master_seed},
                  {"n_realizations", summary.n_realizations},
                  {"n_included", summary.n_included},
                  {"n_excluded", summary.n_excluded},
                  {"n_below_target", summary.n_below_target},
                  {"single_sample", summary.single_sample},
                  {"mean_infidelity", summary.mean_infidelity},
                  {"sem_infidelity", summary.sem_infidelity},
                  {"mean_rel_err", summary.mean_rel_err},
                  {"sem_rel_err", summary.sem_rel_err},
                  {"outcomes", outcomes}};
  return dump(j);
}

std::string entropy_scan_to_json(const EntropyScan& scan) {
  json points = json::array();
  for (const EntropyPoint& p : scan.points) {
    points.push_back({{"L", p.L}, {"n", p.n}, {"mean_s2", p.mean_s2}, {"sem", p.sem}});
  }
  const json j = {{"model", to_string(scan.model)},
                  {"master_seed", scan.master_seed},
                  {"zero_couplings", scan.zero_couplings},
                  {"points", points},
                  {"slope", scan.slope},
                  {"intercept", scan.intercept},
                  {"r2", scan.r2}};
  return dump(j);
}

std::string scaling_fit_to_json(const ScalingFit& fit) {
  const json j = {{"power", fit_line_to_json(fit.power)},
                  {"exponential", fit_line_to_json(fit.exponential)},
                  {"preferred", fit.prefer_power ? "power" : "exponential"},
                  {"n_points", fit.n_points}};
  return dump(j);
}

void write_trace_csv(const std::string& path, const std::vector<TracePoint>& trace) {
  std::string out = "step,infidelity,rel_energy_error\n";
  for (const TracePoint& p : trace) {
    out += std::to_string(p.step) + "," + format_double(p.infidelity) + "," +
           format_double(p.rel_energy_error) + "\n";
  }
  write_text_file(path, out);
}

namespace {

void write_summary_csv(const std::string& path, const std::vector<EnsembleSummary>& rows,
                       const char* header, bool infidelity) {
  std::string out = header;
  out += "\n";
  for (const EnsembleSummary& s : rows) {
    const double mean = infidelity ? s.mean_infidelity : s.mean_rel_err;
    const double sem = infidelity ? s.sem_infidelity : s.sem_rel_err;
    out += std::string(to_string(s.model)) + "," + to_string(s.ansatz) + "," +
           std::to_string(s.L) + "," + format_double(s.alpha) + "," + format_double(mean) +
           "," + format_double(sem) + "," + std::to_string(s.n_included) + "\n";
  }
  write_text_file(path, out);
}

}  // namespace

void write_fig_a_csv(const std::string& path, const std::vector<EnsembleSummary>& rows) {
  write_summary_csv(path, rows, "model,ansatz,L,alpha,mean_infidelity,sem,n", true);
}

void write_fig_b_csv(const std::string& path, const std::vector<EnsembleSummary>& rows) {
  write_summary_csv(path, rows, "model,ansatz,L,alpha,mean_rel_err,sem,n", false);
}

void write_fig_c_csv(const std::string& path, const std::vector<ScalingRow>& rows) {
  std::string out = "model,ansatz,L,min_params,achieved_error,extrapolated\n";
  for (const ScalingRow& r : rows) {
    if (r.point.unbounded) continue;
    out += std::string(to_string(r.model)) + "," + to_string(r.ansatz) + "," +
           std::to_string(r.point.L) + "," + std::to_string(r.point.min_parameters) + "," +
           format_double(r.point.achieved_error) + "," +
           (r.point.extrapolated ? "1" : "0") + "\n";
  }
  write_text_file(path, out);
}

void write_fig_d_csv(const std::string& path, const std::vector<EntropyScan>& scans) {
  std::string out = "model,L,mean_S2,sem,slope,r2\n";
  for (const EntropyScan& scan : scans) {
    for (const EntropyPoint& p : scan.points) {
      out += std::string(to_string(scan.model)) + "," + std::to_string(p.L) + "," +
             format_double(p.mean_s2) + "," + format_double(p.sem) + "," +
             format_double(scan.slope) + "," + format_double(scan.r2) + "\n";
    }
  }
  write_text_file(path, out);
}

std::vector<OutputHash> hash_files(const std::string& base_dir,
                                   const std::vector<std::string>& files) {
  std::vector<OutputHash> hashes;
  for (const std::string& file : files) {
    const std::string full =
        base_dir.empty() ? file : (std::filesystem::path(base_dir) / file).string();
    const std::uint64_t h = fnv1a64(read_text_file(full));
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
    hashes.push_back({file, hex});
  }
  return hashes;
}

std::string manifest_to_json(const std::string& command, const std::string& config_json,
                             std::uint64_t seed, const std::vector<OutputHash>& outputs,
                             const std::string& timestamp_iso) {
  json out_list = json::array();
  for (const OutputHash& o : outputs) {
    out_list.push_back({{"file", o.file}, {"fnv1a64", o.fnv1a64_hex}});
  }
  const json j = {{"command", command},
                  {"seed", seed},
                  {"config", parse_or_throw(config_json, "manifest config")},
                  {"outputs", out_list},
                  {"timestamp", timestamp_iso}};
  return dump(j);
}

}  // namespace nqslab
