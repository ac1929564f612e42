// Copyright 2026 The nqslab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Disorder-ensemble orchestration: infidelity/energy-error ensembles,
// parameters-to-error scaling with power-law vs. exponential discrimination,
// entropy scans, and the V = 0 control.
//
// Seeding contract: realization r of a run with master seed s uses
// derive_seed(s, r); entropy scans use derive_seed(derive_seed(s, L), r).
// Results are therefore independent of execution order and worker count.

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "nqslab/ansatz.hpp"
#include "nqslab/models.hpp"
#include "nqslab/optimize.hpp"

namespace nqslab {

enum class ModelKind { kQsk, kDf };
enum class AnsatzKind { kMlp, kBackflow };

const char* to_string(ModelKind kind);
const char* to_string(AnsatzKind kind);
ModelKind model_kind_from_string(const std::string& name);    // throws ConfigError
AnsatzKind ansatz_kind_from_string(const std::string& name);  // throws ConfigError

struct EnsembleRequest {
  ModelKind model = ModelKind::kQsk;
  AnsatzKind ansatz = AnsatzKind::kMlp;
  int L = 4;
  double alpha = 2.0;   // hidden-unit density; used when width == 0
  int width = 0;        // explicit hidden width; > 0 overrides alpha
  int n_realizations = 10;
  double h = 1.0;       // QSK transverse field
  double sigma = 0.0;   // coupling std; <= 0 selects the default 1/sqrt(L)
  bool v_zero = false;  // force V = 0 (DF control runs)
  int threads = 1;      // worker count over realizations; never affects results

  int hidden() const;     // resolved hidden width, >= 1
  int particles() const;  // floor(L/2) for DF, -1 for QSK
  void validate() const;  // throws ConfigError
};

struct RealizationOutcome {
  std::uint64_t seed = 0;  // derived seed; regenerates disorder and training
  double infidelity = 1.0;
  double rel_energy_error = 0.0;
  double energy = 0.0;
  double target_energy = 0.0;
  long long steps_used = 0;
  bool excluded = false;  // |E0| guard tripped; kept out of the means
};

struct EnsembleSummary {
  ModelKind model{};
  AnsatzKind ansatz{};
  int L = 0;
  int N = -1;
  double alpha = 0.0;
  int width = 0;
  long long parameter_count = 0;
  std::uint64_t master_seed = 0;
  int n_realizations = 0;  // requested
  int n_included = 0;
  int n_excluded = 0;
  int n_below_target = 0;  // included runs with infidelity < target_infidelity
  bool single_sample = false;  // n_included == 1, sem reported as 0
  double mean_infidelity = 0.0;
  double sem_infidelity = 0.0;
  double mean_rel_err = 0.0;
  double sem_rel_err = 0.0;
  std::vector<RealizationOutcome> outcomes;  // in realization order
};

/// Mean and standard error (sample std / sqrt(n)); n = 1 gives sem = 0.
struct Statistics {
  double mean = 0.0;
  double sem = 0.0;
};
Statistics mean_sem(const std::vector<double>& xs);

/// Ordinary least squares y = intercept + slope * x.
struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double rss = 0.0;
  double r2 = 1.0;
};
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

/// Samples disorder, diagonalizes, trains, and aggregates one ensemble.
/// Realization r uses seed derive_seed(master_seed, r). Excluded
/// realizations (|E0| <= 1e-8) are reported in the outcome list and counts.
EnsembleSummary run_ensemble(const EnsembleRequest& request, std::uint64_t master_seed,
                             const TrainConfig& train);

// ---------------------------------------------------------------------------
// Parameters-to-error scaling
// ---------------------------------------------------------------------------

struct ScalingPoint {
  int L = 0;
  int width = 0;  // hidden width behind min_parameters; 0 for extrapolations
  long long min_parameters = 0;
  double achieved_error = 0.0;  // NaN for extrapolated points
  bool extrapolated = false;
  bool unbounded = false;  // width cap hit without reaching the target
};

struct WidthSearchResult {
  int width = 0;
  double achieved_error = 0.0;
  bool unbounded = false;
};

/// Smallest width in [width_lo, width_hi] with error_at_width(m) <= target,
/// by bisection; assumes error is monotone non-increasing in the width.
/// Returns unbounded = true when even width_hi misses the target. The
/// evaluator must be deterministic; each width is evaluated at most once.
WidthSearchResult min_width_for_error(const std::function<double(int)>& error_at_width,
                                      int width_lo, int width_hi, double target_error);

/// Full-pipeline width search: the error at width m is the ensemble-mean
/// relative energy error of `n_realizations` disorder instances (the same
/// instances at every width, seeded from master_seed).
ScalingPoint min_params_for_error(ModelKind model, AnsatzKind ansatz, int L,
                                  double target_error, std::uint64_t master_seed,
                                  int width_lo, int width_hi, const TrainConfig& train,
                                  int n_realizations, int threads = 1);

struct FitLine {
  double intercept = 0.0;
  double slope = 0.0;
  double rss = 0.0;
  double aic = 0.0;
};

struct ScalingFit {
  FitLine power;        // log p = intercept + slope * log L
  FitLine exponential;  // log p = intercept + slope * L
  bool prefer_power = false;  // lower AIC wins; equal counts reduce to RSS
  int n_points = 0;
};

/// Fits both scaling laws to the non-extrapolated, bounded points.
/// Throws InsufficientDataError with fewer than 3 usable points.
ScalingFit fit_scaling(const std::vector<ScalingPoint>& points);

/// Predicted parameter count at L from the preferred fit; flagged
/// extrapolated, achieved_error = NaN, and excluded from later fits.
ScalingPoint extrapolate_params(const ScalingFit& fit, int L);

// ---------------------------------------------------------------------------
// Entropy scans and the V = 0 control
// ---------------------------------------------------------------------------

struct EntropyPoint {
  int L = 0;
  int n = 0;
  double mean_s2 = 0.0;
  double sem = 0.0;
};

struct EntropyScan {
  ModelKind model{};
  std::uint64_t master_seed = 0;
  bool zero_couplings = false;
  std::vector<EntropyPoint> points;
  // Linear fit mean_s2 = slope * L + intercept over the scanned sizes.
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 1.0;
};

/// Ground-state Renyi-2 entropy at the maximum bipartition, per size, over a
/// disorder ensemble. zero_couplings (QSK only) zeroes J as the product-state
/// control.
EntropyScan entropy_scan(ModelKind model, const std::vector<int>& sizes, int n_realizations,
                         std::uint64_t master_seed, double h = 1.0,
                         bool zero_couplings = false, int threads = 1);

/// run_ensemble on DF with V forced to zero; the free-fermion control.
EnsembleSummary v_zero_control(int L, int n_realizations, std::uint64_t master_seed,
                               AnsatzKind ansatz, const TrainConfig& train, int threads = 1);

/// Smallest MLP hidden width whose parameter count is >= the backflow's.
int matched_mlp_width(const BackflowSpec& spec);

}  // namespace nqslab
