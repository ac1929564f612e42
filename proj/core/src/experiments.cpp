// Copyright 2026 The nqslab Authors
// SPDX-License-Identifier: Apache-2.0

#include "nqslab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "nqslab/basis.hpp"
#include "nqslab/errors.hpp"
#include "nqslab/exact.hpp"
#include "nqslab/rng.hpp"

namespace nqslab {

namespace {

// Stream index separating the training seed from the disorder seed.
constexpr std::uint64_t kTrainStream = 1;

/// Runs work(0..n-1) on up to `threads` workers. Slot i always performs the
/// same computation regardless of the worker count, and callers aggregate in
/// index order afterward, so results are thread-count independent.
void parallel_slots(int n, int threads, const std::function<void(int)>& work) {
  const int t = std::min(threads, n);
  if (t <= 1) {
    for (int i = 0; i < n; ++i) work(i);
    return;
  }
  std::mutex mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(t));
  for (int w = 0; w < t; ++w) {
    pool.emplace_back([&, w] {
      for (int i = w; i < n; i += t) {
        try {
          work(i);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (std::thread& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

MlpSpec mlp_spec_for(const EnsembleRequest& req) {
  MlpSpec spec;
  spec.L = req.L;
  spec.alpha = req.width > 0 ? static_cast<double>(req.width) / req.L : req.alpha;
  return spec;
}

/// One disorder realization end to end: sample, diagonalize, train.
RealizationOutcome run_one(const EnsembleRequest& req, std::uint64_t seed,
                           const TrainConfig& train) {
  RealizationOutcome out;
  out.seed = seed;
  DisorderRealization disorder = req.sigma > 0.0 ? sample_disorder(req.L, seed, req.sigma)
                                                 : sample_disorder(req.L, seed);
  if (req.v_zero) disorder.V.setZero();

  std::unique_ptr<WavefunctionModel> model;
  std::optional<HamiltonianOperator> op;
  if (req.model == ModelKind::kQsk) {
    const SpinBasis basis = enumerate_spin_basis(req.L);
    op.emplace(build_qsk({req.h, disorder.J}, basis));
    model = std::make_unique<MlpModel>(mlp_spec_for(req), basis);
  } else {
    const FermionSector sector = enumerate_sector(req.L, req.particles());
    op.emplace(build_df(disorder, sector));
    if (req.ansatz == AnsatzKind::kMlp) {
      model = std::make_unique<MlpModel>(mlp_spec_for(req), sector);
    } else {
      BackflowSpec spec;
      spec.L = req.L;
      spec.N = req.particles();
      spec.hidden = req.hidden();
      spec.reference_orbitals = hartree_fock_orbitals(disorder.J, spec.N);
      model = std::make_unique<BackflowModel>(std::move(spec), sector);
    }
  }

  const GroundState target = ground_state(*op);
  out.target_energy = target.energy;
  try {
    const TrainResult res =
        train_fidelity(*model, target, *op, train, derive_seed(seed, kTrainStream));
    out.infidelity = res.final_infidelity;
    out.energy = res.final_energy;
    out.rel_energy_error = res.relative_energy_error;
    out.steps_used = res.steps_used;
  } catch (const ExcludedRealizationError&) {
    out.excluded = true;
    out.infidelity = std::numeric_limits<double>::quiet_NaN();
    out.rel_energy_error = std::numeric_limits<double>::quiet_NaN();
    out.energy = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

long long parameter_count_at_width(ModelKind model, AnsatzKind ansatz, int L, int width) {
  if (ansatz == AnsatzKind::kMlp) {
    MlpSpec spec;
    spec.L = L;
    spec.alpha = static_cast<double>(width) / L;
    return spec.parameter_count();
  }
  BackflowSpec spec;
  spec.L = L;
  spec.N = model == ModelKind::kDf ? L / 2 : -1;
  spec.hidden = width;
  return spec.parameter_count();
}

double aic_for(double rss, int n) {
  // Two fitted parameters in both candidate laws.
  return n * std::log(rss / n) + 4.0;
}

}  // namespace

const char* to_string(ModelKind kind) { return kind == ModelKind::kQsk ? "qsk" : "df"; }
const char* to_string(AnsatzKind kind) {
  return kind == AnsatzKind::kMlp ? "mlp" : "backflow";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "qsk") return ModelKind::kQsk;
  if (name == "df") return ModelKind::kDf;
  throw ConfigError("unknown model '" + name + "' (expected qsk or df)");
}

AnsatzKind ansatz_kind_from_string(const std::string& name) {
  if (name == "mlp") return AnsatzKind::kMlp;
  if (name == "backflow") return AnsatzKind::kBackflow;
  throw ConfigError("unknown ansatz '" + name + "' (expected mlp or backflow)");
}

int EnsembleRequest::hidden() const {
  if (width > 0) return width;
  const auto m = static_cast<int>(std::llround(alpha * L));
  return m < 1 ? 1 : m;
}

int EnsembleRequest::particles() const { return model == ModelKind::kDf ? L / 2 : -1; }

void EnsembleRequest::validate() const {
  if (L < 1 || L > kMaxSites) throw ConfigError("ensemble: L out of range");
  if (model == ModelKind::kDf && L < 2) throw ConfigError("ensemble: DF needs L >= 2");
  if (n_realizations < 1) throw ConfigError("ensemble: n_realizations must be >= 1");
  if (width < 0) throw ConfigError("ensemble: width must be >= 0");
  if (width == 0 && !(alpha > 0.0)) throw ConfigError("ensemble: alpha must be > 0");
  if (model == ModelKind::kQsk && !(h > 0.0)) throw ConfigError("ensemble: QSK needs h > 0");
  if (model == ModelKind::kQsk && ansatz == AnsatzKind::kBackflow) {
    throw ConfigError("ensemble: backflow requires a fermionic sector (model df)");
  }
  if (v_zero && model != ModelKind::kDf) {
    throw ConfigError("ensemble: v_zero only applies to model df");
  }
  if (threads < 1) throw ConfigError("ensemble: threads must be >= 1");
}

Statistics mean_sem(const std::vector<double>& xs) {
  if (xs.empty()) throw InsufficientDataError("mean_sem: empty sample");
  Statistics s;
  const auto n = static_cast<double>(xs.size());
  for (const double x : xs) s.mean += x;
  s.mean /= n;
  if (xs.size() == 1) return s;
  double ssq = 0.0;
  for (const double x : xs) ssq += (x - s.mean) * (x - s.mean);
  s.sem = std::sqrt(ssq / (n - 1.0)) / std::sqrt(n);
  return s;
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ContractViolation("linear_fit: length mismatch");
  if (x.size() < 2) throw InsufficientDataError("linear_fit: need at least 2 points");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw DegenerateInputError("linear_fit: all abscissae equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    fit.rss += r * r;
  }
  fit.r2 = syy == 0.0 ? 1.0 : 1.0 - fit.rss / syy;
  return fit;
}

EnsembleSummary run_ensemble(const EnsembleRequest& request, std::uint64_t master_seed,
                             const TrainConfig& train) {
  request.validate();
  train.validate();
  EnsembleSummary summary;
  summary.model = request.model;
  summary.ansatz = request.ansatz;
  summary.L = request.L;
  summary.N = request.particles();
  summary.width = request.hidden();
  summary.alpha = static_cast<double>(summary.width) / request.L;
  summary.master_seed = master_seed;
  summary.n_realizations = request.n_realizations;
  summary.parameter_count =
      parameter_count_at_width(request.model, request.ansatz, request.L, request.hidden());

  summary.outcomes.resize(static_cast<std::size_t>(request.n_realizations));
  parallel_slots(request.n_realizations, request.threads, [&](int r) {
    const std::uint64_t seed = derive_seed(master_seed, static_cast<std::uint64_t>(r));
    summary.outcomes[static_cast<std::size_t>(r)] = run_one(request, seed, train);
  });

  std::vector<double> infidelities;
  std::vector<double> rel_errors;
  for (const RealizationOutcome& out : summary.outcomes) {
    if (out.excluded) {
      ++summary.n_excluded;
      continue;
    }
    ++summary.n_included;
    infidelities.push_back(out.infidelity);
    rel_errors.push_back(out.rel_energy_error);
    if (out.infidelity < train.target_infidelity) ++summary.n_below_target;
  }
  if (summary.n_included == 0) {
    throw ExcludedRealizationError("run_ensemble: every realization hit the |E0| guard");
  }
  const Statistics si = mean_sem(infidelities);
  summary.mean_infidelity = si.mean;
  summary.sem_infidelity = si.sem;
  const Statistics se = mean_sem(rel_errors);
  summary.mean_rel_err = se.mean;
  summary.sem_rel_err = se.sem;
  summary.single_sample = summary.n_included == 1;
  return summary;
}

WidthSearchResult min_width_for_error(const std::function<double(int)>& error_at_width,
                                      int width_lo, int width_hi, double target_error) {
  if (width_lo < 1 || width_hi < width_lo) {
    throw DomainError("min_width_for_error: need 1 <= width_lo <= width_hi");
  }
  if (!(target_error > 0.0)) throw DomainError("min_width_for_error: target must be > 0");
  std::map<int, double> memo;
  const auto err = [&](int m) {
    const auto it = memo.find(m);
    if (it != memo.end()) return it->second;
    const double e = error_at_width(m);
    memo.emplace(m, e);
    return e;
  };

  const double at_lo = err(width_lo);
  if (at_lo <= target_error) return {width_lo, at_lo, false};
  const double at_hi = err(width_hi);
  if (at_hi > target_error) return {width_hi, at_hi, true};

  int lo = width_lo;  // fails
  int hi = width_hi;  // succeeds
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    if (err(mid) <= target_error) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return {hi, memo.at(hi), false};
}

ScalingPoint min_params_for_error(ModelKind model, AnsatzKind ansatz, int L,
                                  double target_error, std::uint64_t master_seed,
                                  int width_lo, int width_hi, const TrainConfig& train,
                                  int n_realizations, int threads) {
  EnsembleRequest request;
  request.model = model;
  request.ansatz = ansatz;
  request.L = L;
  request.n_realizations = n_realizations;
  request.threads = threads;
  const auto error_at_width = [&](int m) {
    EnsembleRequest r = request;
    r.width = m;
    return run_ensemble(r, master_seed, train).mean_rel_err;
  };
  const WidthSearchResult res =
      min_width_for_error(error_at_width, width_lo, width_hi, target_error);
  ScalingPoint point;
  point.L = L;
  point.width = res.width;
  point.min_parameters = parameter_count_at_width(model, ansatz, L, res.width);
  point.achieved_error = res.achieved_error;
  point.unbounded = res.unbounded;
  return point;
}

ScalingFit fit_scaling(const std::vector<ScalingPoint>& points) {
  std::vector<double> sizes;
  std::vector<double> log_sizes;
  std::vector<double> log_params;
  for (const ScalingPoint& p : points) {
    if (p.extrapolated || p.unbounded) continue;
    sizes.push_back(static_cast<double>(p.L));
    log_sizes.push_back(std::log(static_cast<double>(p.L)));
    log_params.push_back(std::log(static_cast<double>(p.min_parameters)));
  }
  if (sizes.size() < 3) {
    throw InsufficientDataError("fit_scaling: need at least 3 measured points");
  }
  ScalingFit fit;
  fit.n_points = static_cast<int>(sizes.size());
  const LinearFit power = linear_fit(log_sizes, log_params);
  const LinearFit expo = linear_fit(sizes, log_params);
  fit.power = {power.intercept, power.slope, power.rss, aic_for(power.rss, fit.n_points)};
  fit.exponential = {expo.intercept, expo.slope, expo.rss, aic_for(expo.rss, fit.n_points)};
  fit.prefer_power = fit.power.aic <= fit.exponential.aic;
  return fit;
}

ScalingPoint extrapolate_params(const ScalingFit& fit, int L) {
  if (fit.n_points < 3) throw ContractViolation("extrapolate_params: fit not populated");
  if (L < 1) throw DomainError("extrapolate_params: L must be >= 1");
  const double log_p = fit.prefer_power
                           ? fit.power.intercept + fit.power.slope * std::log(L)
                           : fit.exponential.intercept + fit.exponential.slope * L;
  ScalingPoint point;
  point.L = L;
  point.min_parameters = std::max(1LL, std::llround(std::exp(log_p)));
  point.achieved_error = std::numeric_limits<double>::quiet_NaN();
  point.extrapolated = true;
  return point;
}

EntropyScan entropy_scan(ModelKind model, const std::vector<int>& sizes, int n_realizations,
                         std::uint64_t master_seed, double h, bool zero_couplings,
                         int threads) {
  if (sizes.size() < 2) {
    throw InsufficientDataError("entropy_scan: need at least 2 sizes for the linear fit");
  }
  if (n_realizations < 1) throw ConfigError("entropy_scan: n_realizations must be >= 1");
  if (zero_couplings && model != ModelKind::kQsk) {
    throw ConfigError("entropy_scan: zero_couplings is the QSK product-state control");
  }
  if (model == ModelKind::kQsk && !(h > 0.0)) throw ConfigError("entropy_scan: QSK needs h > 0");

  EntropyScan scan;
  scan.model = model;
  scan.master_seed = master_seed;
  scan.zero_couplings = zero_couplings;

  std::vector<double> xs;
  std::vector<double> ys;
  for (const int L : sizes) {
    if (L < 2 || L > kMaxSites) throw ConfigError("entropy_scan: L out of range");
    const std::uint64_t seed_l = derive_seed(master_seed, static_cast<std::uint64_t>(L));
    std::vector<double> entropies(static_cast<std::size_t>(n_realizations));
    const Bipartition cut = max_bipartition(L);
    parallel_slots(n_realizations, threads, [&](int r) {
      const std::uint64_t seed = derive_seed(seed_l, static_cast<std::uint64_t>(r));
      DisorderRealization disorder = sample_disorder(L, seed);
      if (zero_couplings) {
        disorder.J.setZero();
        disorder.V.setZero();
      }
      double s2 = 0.0;
      if (model == ModelKind::kQsk) {
        const SpinBasis basis = enumerate_spin_basis(L);
        const GroundState gs = ground_state(build_qsk({h, disorder.J}, basis));
        s2 = renyi2_entropy(gs.amplitudes, cut).s2;
      } else {
        const FermionSector sector = enumerate_sector(L, L / 2);
        const GroundState gs = ground_state(build_df(disorder, sector));
        const Eigen::VectorXd full = embed_sector_vector(gs.amplitudes, sector);
        s2 = renyi2_entropy(full, cut).s2;
      }
      entropies[static_cast<std::size_t>(r)] = s2;
    });
    const Statistics s = mean_sem(entropies);
    scan.points.push_back({L, n_realizations, s.mean, s.sem});
    xs.push_back(static_cast<double>(L));
    ys.push_back(s.mean);
  }
  const LinearFit fit = linear_fit(xs, ys);
  scan.slope = fit.slope;
  scan.intercept = fit.intercept;
  scan.r2 = fit.r2;
  return scan;
}

EnsembleSummary v_zero_control(int L, int n_realizations, std::uint64_t master_seed,
                               AnsatzKind ansatz, const TrainConfig& train, int threads) {
  EnsembleRequest request;
  request.model = ModelKind::kDf;
  request.ansatz = ansatz;
  request.L = L;
  request.n_realizations = n_realizations;
  request.v_zero = true;
  request.threads = threads;
  if (ansatz == AnsatzKind::kBackflow) {
    request.width = L;
  } else {
    // Give the perceptron at least the backflow parameter budget.
    BackflowSpec reference;
    reference.L = L;
    reference.N = L / 2;
    reference.hidden = L;
    request.width = matched_mlp_width(reference);
  }
  return run_ensemble(request, master_seed, train);
}

int matched_mlp_width(const BackflowSpec& spec) {
  const long long budget = spec.parameter_count();
  const long long per_unit = spec.L + 2;
  const long long m = (budget - 1 + per_unit - 1) / per_unit;
  return static_cast<int>(std::max(1LL, m));
}

}  // namespace nqslab
