// Copyright 2026 The nqslab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Serialization: JSON records for states and results, plot-ready CSV tables,
// and run manifests with content hashes. All output is deterministic for a
// given input; the manifest timestamp is the only field that varies between
// identical runs, and it never enters any hash.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "nqslab/exact.hpp"
#include "nqslab/experiments.hpp"
#include "nqslab/models.hpp"
#include "nqslab/optimize.hpp"

namespace nqslab {

/// FNV-1a 64-bit content hash.
std::uint64_t fnv1a64(std::string_view bytes);

/// Reads a whole file. Throws ConfigError when it cannot be opened.
std::string read_text_file(const std::string& path);

/// Writes a whole file, creating parent directories as needed.
/// Throws ConfigError on failure.
void write_text_file(const std::string& path, std::string_view content);

/// Round-trip-safe decimal form ("%.17g").
std::string format_double(double value);

// --- JSON records ----------------------------------------------------------

std::string disorder_to_json(const DisorderRealization& disorder);

/// Parses {"L", "j_upper", ["v_upper"], ["seed"], ["sigma"]} with the upper
/// triangles row-major (i < j). Throws ConfigError on malformed input.
DisorderRealization disorder_from_json(const std::string& text);

std::string ground_state_to_json(const GroundState& gs);
std::string train_config_to_json(const TrainConfig& config);
std::string train_result_to_json(const TrainResult& result);
std::string ensemble_to_json(const EnsembleSummary& summary);
std::string entropy_scan_to_json(const EntropyScan& scan);
std::string scaling_fit_to_json(const ScalingFit& fit);

// --- CSV tables --------------------------------------------------------------

/// Columns: step,infidelity,rel_energy_error.
void write_trace_csv(const std::string& path, const std::vector<TracePoint>& trace);

/// Columns: model,ansatz,L,alpha,mean_infidelity,sem,n.
void write_fig_a_csv(const std::string& path, const std::vector<EnsembleSummary>& rows);

/// Columns: model,ansatz,L,alpha,mean_rel_err,sem,n.
void write_fig_b_csv(const std::string& path, const std::vector<EnsembleSummary>& rows);

struct ScalingRow {
  ModelKind model{};
  AnsatzKind ansatz{};
  ScalingPoint point;
};

/// Columns: model,ansatz,L,min_params,achieved_error,extrapolated.
/// Width-capped (unbounded) points stay out of the table; they are recorded
/// in the JSON report instead.
void write_fig_c_csv(const std::string& path, const std::vector<ScalingRow>& rows);

/// Columns: model,L,mean_S2,sem,slope,r2 (fit values repeat per row).
void write_fig_d_csv(const std::string& path, const std::vector<EntropyScan>& scans);

// --- Manifests ----------------------------------------------------------------

struct OutputHash {
  std::string file;         // path as recorded in the manifest
  std::string fnv1a64_hex;  // 16 hex digits of the content hash
};

/// Hashes existing files; `files` are paths relative to `base_dir`.
std::vector<OutputHash> hash_files(const std::string& base_dir,
                                   const std::vector<std::string>& files);

/// Assembles the run manifest. `config_json` must be a valid JSON object; it
/// is embedded verbatim. The timestamp is excluded from all hashes.
std::string manifest_to_json(const std::string& command, const std::string& config_json,
                             std::uint64_t seed, const std::vector<OutputHash>& outputs,
                             const std::string& timestamp_iso);

}  // namespace nqslab
