// Copyright 2026 The nqslab Authors
// SPDX-License-Identifier: Apache-2.0

#include "nqslab/experiments.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

#include <doctest.h>

#include "nqslab/errors.hpp"
#include "nqslab/rng.hpp"
#include "oracles.hpp"

using namespace nqslab;

namespace {

/// Fast training budget for wiring tests; convergence quality is irrelevant.
TrainConfig quick_train() {
  TrainConfig cfg;
  cfg.max_steps = 60;
  cfg.restarts = 1;
  cfg.patience = 60;
  return cfg;
}

bool outcomes_equal(const EnsembleSummary& a, const EnsembleSummary& b) {
  if (a.outcomes.size() != b.outcomes.size()) return false;
  for (std::size_t k = 0; k < a.outcomes.size(); ++k) {
    const RealizationOutcome& x = a.outcomes[k];
    const RealizationOutcome& y = b.outcomes[k];
    const bool metrics_equal =
        x.excluded ? y.excluded
                   : (x.infidelity == y.infidelity && x.rel_energy_error == y.rel_energy_error &&
                      x.energy == y.energy);
    if (x.seed != y.seed || x.excluded != y.excluded || !metrics_equal) return false;
  }
  return a.mean_infidelity == b.mean_infidelity && a.sem_infidelity == b.sem_infidelity &&
         a.mean_rel_err == b.mean_rel_err && a.sem_rel_err == b.sem_rel_err;
}

}  // namespace

TEST_CASE("kind names round-trip") {
  CHECK(model_kind_from_string("qsk") == ModelKind::kQsk);
  CHECK(model_kind_from_string("df") == ModelKind::kDf);
  CHECK(ansatz_kind_from_string("mlp") == AnsatzKind::kMlp);
  CHECK(ansatz_kind_from_string("backflow") == AnsatzKind::kBackflow);
  CHECK(std::string(to_string(ModelKind::kDf)) == "df");
  CHECK(std::string(to_string(AnsatzKind::kBackflow)) == "backflow");
  CHECK_THROWS_AS(model_kind_from_string("ising"), ConfigError);
  CHECK_THROWS_AS(ansatz_kind_from_string("rbm"), ConfigError);
}

TEST_CASE("request validation") {
  EnsembleRequest r;
  CHECK_NOTHROW(r.validate());

  r.model = ModelKind::kQsk;
  r.ansatz = AnsatzKind::kBackflow;
  CHECK_THROWS_AS(r.validate(), ConfigError);

  r = EnsembleRequest{};
  r.v_zero = true;
  CHECK_THROWS_AS(r.validate(), ConfigError);  // v_zero is a DF control

  r = EnsembleRequest{};
  r.n_realizations = 0;
  CHECK_THROWS_AS(r.validate(), ConfigError);

  r = EnsembleRequest{};
  r.threads = 0;
  CHECK_THROWS_AS(r.validate(), ConfigError);

  // Width override wins over alpha.
  r = EnsembleRequest{};
  r.L = 6;
  r.alpha = 2.0;
  CHECK(r.hidden() == 12);
  r.width = 5;
  CHECK(r.hidden() == 5);
  CHECK(r.particles() == -1);
  r.model = ModelKind::kDf;
  CHECK(r.particles() == 3);
}

TEST_CASE("mean_sem statistics") {
  const Statistics s = mean_sem({1.0, 2.0, 3.0, 4.0});
  CHECK(s.mean == doctest::Approx(2.5).epsilon(1e-15));
  // Sample std = sqrt(5/3), sem = sqrt(5/3)/2.
  CHECK(s.sem == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0).epsilon(1e-12));

  const Statistics single = mean_sem({7.0});
  CHECK(single.mean == 7.0);
  CHECK(single.sem == 0.0);

  CHECK_THROWS_AS(mean_sem({}), InsufficientDataError);
}

TEST_CASE("linear fit recovers an exact line") {
  const std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
  const std::vector<double> y = {3.0, 5.0, 7.0, 9.0};  // y = 1 + 2x
  const LinearFit fit = linear_fit(x, y);
  CHECK(fit.intercept == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.rss <= 1e-20);
  CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ensembles are deterministic and thread-count independent") {
  EnsembleRequest request;
  request.model = ModelKind::kQsk;
  request.ansatz = AnsatzKind::kMlp;
  request.L = 4;
  request.alpha = 2.0;
  request.n_realizations = 4;

  const EnsembleSummary serial = run_ensemble(request, 42, quick_train());
  const EnsembleSummary repeat = run_ensemble(request, 42, quick_train());
  CHECK(outcomes_equal(serial, repeat));

  for (const int threads : {2, 3, 5}) {
    EnsembleRequest parallel = request;
    parallel.threads = threads;
    const EnsembleSummary summary = run_ensemble(parallel, 42, quick_train());
    CHECK(outcomes_equal(serial, summary));
  }

  // A different master seed draws different disorder.
  const EnsembleSummary other = run_ensemble(request, 43, quick_train());
  CHECK_FALSE(outcomes_equal(serial, other));
}

TEST_CASE("single-realization ensembles carry the flag") {
  EnsembleRequest request;
  request.L = 4;
  request.n_realizations = 1;
  const EnsembleSummary summary = run_ensemble(request, 7, quick_train());
  CHECK(summary.single_sample);
  CHECK(summary.sem_infidelity == 0.0);
  CHECK(summary.n_included == 1);
}

TEST_CASE("ensemble metadata is filled in") {
  EnsembleRequest request;
  request.model = ModelKind::kDf;
  request.ansatz = AnsatzKind::kBackflow;
  request.L = 4;
  request.alpha = 1.0;
  request.n_realizations = 2;
  const EnsembleSummary summary = run_ensemble(request, 9, quick_train());
  CHECK(summary.L == 4);
  CHECK(summary.N == 2);
  CHECK(summary.width == 4);
  CHECK(summary.master_seed == 9);
  CHECK(summary.n_realizations == 2);
  CHECK(summary.outcomes.size() == 2);
  // Backflow at L=4, N=2, m=4: 16 + 4 + 32 + 8 = 60.
  CHECK(summary.parameter_count == 60);
  for (const RealizationOutcome& outcome : summary.outcomes) {
    CHECK(outcome.target_energy != 0.0);
  }
}

TEST_CASE("width search on a mock error curve") {
  // err(m) = 1/m, target 0.1 -> smallest width is exactly 10.
  const auto err = [](int m) { return 1.0 / static_cast<double>(m); };
  const WidthSearchResult r = min_width_for_error(err, 1, 64, 0.1);
  CHECK_FALSE(r.unbounded);
  CHECK(r.width == 10);
  CHECK(r.achieved_error == doctest::Approx(0.1).epsilon(1e-15));

  // Target met at the lower bound.
  const WidthSearchResult lo = min_width_for_error(err, 16, 64, 0.1);
  CHECK_FALSE(lo.unbounded);
  CHECK(lo.width == 16);

  // Cap too small: unbounded flag.
  const WidthSearchResult capped = min_width_for_error(err, 1, 5, 0.1);
  CHECK(capped.unbounded);
  CHECK(capped.width == 5);

  CHECK_THROWS_AS(min_width_for_error(err, 0, 5, 0.1), DomainError);
  CHECK_THROWS_AS(min_width_for_error(err, 1, 5, 0.0), DomainError);
}

TEST_CASE("width search evaluates each width once") {
  int calls = 0;
  const auto err = [&calls](int m) {
    ++calls;
    return 1.0 / static_cast<double>(m);
  };
  const WidthSearchResult r = min_width_for_error(err, 1, 64, 0.1);
  CHECK(r.width == 10);
  // Bisection over 64 widths touches O(log) of them.
  CHECK(calls <= 10);
}

TEST_CASE("scaling fit discriminates the two laws") {
  const std::vector<int> sizes = {4, 6, 8, 10, 12};

  // p = L^2: power law preferred, exponent within 0.01.
  std::vector<ScalingPoint> power_points;
  const std::vector<double> p2 = testing::power_law_samples(sizes, 1.0, 2.0);
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    power_points.push_back(
        {sizes[k], 1, static_cast<long long>(std::llround(p2[k])), 1e-3, false, false});
  }
  const ScalingFit power_fit = fit_scaling(power_points);
  CHECK(power_fit.prefer_power);
  CHECK(power_fit.n_points == 5);
  CHECK(power_fit.power.slope == doctest::Approx(2.0).epsilon(0.01));

  // p = 2 e^{0.8 L}: exponential preferred, rate within 1%.
  std::vector<ScalingPoint> exp_points;
  const std::vector<double> pe = testing::exponential_samples(sizes, 2.0, 0.8);
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    exp_points.push_back(
        {sizes[k], 1, static_cast<long long>(std::llround(pe[k])), 1e-3, false, false});
  }
  const ScalingFit exp_fit = fit_scaling(exp_points);
  CHECK_FALSE(exp_fit.prefer_power);
  CHECK(exp_fit.exponential.slope == doctest::Approx(0.8).epsilon(0.01));
}

TEST_CASE("scaling fit needs at least three usable points") {
  std::vector<ScalingPoint> two = {{4, 1, 16, 1e-3, false, false},
                                   {6, 1, 36, 1e-3, false, false}};
  CHECK_THROWS_AS(fit_scaling(two), InsufficientDataError);

  // Extrapolated and unbounded points do not count as usable.
  std::vector<ScalingPoint> padded = two;
  padded.push_back({8, 0, 64, std::nan(""), true, false});
  padded.push_back({10, 64, 100, 0.5, false, true});
  CHECK_THROWS_AS(fit_scaling(padded), InsufficientDataError);
}

TEST_CASE("model selection survives noise") {
  // 5% multiplicative noise on both laws; AIC must pick the generator in at
  // least 95% of trials.
  const std::vector<int> sizes = {4, 6, 8, 10, 12, 14};
  int correct = 0;
  const int trials = 100;
  GaussianSampler g(31415);
  for (int trial = 0; trial < trials; ++trial) {
    const bool is_power = trial % 2 == 0;
    const std::vector<double> clean =
        is_power ? testing::power_law_samples(sizes, 0.75, 2.0)
                 : testing::exponential_samples(sizes, 2.0, 0.8);
    std::vector<ScalingPoint> points;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      const double noisy = clean[k] * (1.0 + 0.05 * g());
      points.push_back({sizes[k], 1,
                        static_cast<long long>(std::llround(std::max(noisy, 1.0))), 1e-3, false,
                        false});
    }
    const ScalingFit fit = fit_scaling(points);
    if (fit.prefer_power == is_power) ++correct;
  }
  CHECK(correct >= 95);
}

TEST_CASE("extrapolation pinned value") {
  // Exact p = L^2 data: predicted parameter count at L = 12 is 144.
  const std::vector<int> sizes = {4, 6, 8, 10};
  std::vector<ScalingPoint> points;
  for (const int L : sizes) {
    points.push_back({L, 1, static_cast<long long>(L) * L, 1e-3, false, false});
  }
  const ScalingFit fit = fit_scaling(points);
  REQUIRE(fit.prefer_power);
  const ScalingPoint p = extrapolate_params(fit, 12);
  CHECK(p.L == 12);
  CHECK(p.min_parameters == 144);
  CHECK(p.extrapolated);
  CHECK(std::isnan(p.achieved_error));
}

TEST_CASE("entropy scan wiring and controls") {
  const std::vector<int> sizes = {4, 6, 8};

  const EntropyScan qsk = entropy_scan(ModelKind::kQsk, sizes, 4, 11);
  REQUIRE(qsk.points.size() == 3);
  for (const EntropyPoint& point : qsk.points) {
    CHECK(point.n == 4);
    CHECK(point.mean_s2 > 0.0);
  }

  // Determinism and thread independence.
  const EntropyScan again = entropy_scan(ModelKind::kQsk, sizes, 4, 11);
  const EntropyScan threaded = entropy_scan(ModelKind::kQsk, sizes, 4, 11, 1.0, false, 3);
  for (std::size_t k = 0; k < qsk.points.size(); ++k) {
    CHECK(qsk.points[k].mean_s2 == again.points[k].mean_s2);
    CHECK(qsk.points[k].mean_s2 == threaded.points[k].mean_s2);
  }

  // J = 0 control: product ground state, S2 = 0 at every size.
  const EntropyScan control = entropy_scan(ModelKind::kQsk, sizes, 2, 11, 1.0, true);
  for (const EntropyPoint& point : control.points) {
    CHECK(std::abs(point.mean_s2) <= 1e-10);
  }
  CHECK(std::abs(control.slope) <= 1e-10);

  CHECK_THROWS_AS(entropy_scan(ModelKind::kQsk, {4}, 2, 1), InsufficientDataError);
  CHECK_THROWS_AS(entropy_scan(ModelKind::kDf, sizes, 2, 1, 1.0, true), ConfigError);
}

TEST_CASE("matched MLP width dominates the backflow parameter count") {
  for (const int L : {4, 6, 8}) {
    BackflowSpec spec;
    spec.L = L;
    spec.N = L / 2;
    spec.hidden = L;
    spec.reference_orbitals = Eigen::MatrixXd::Zero(spec.N, L);
    const int width = matched_mlp_width(spec);
    const MlpSpec matched{L, static_cast<double>(width) / L};
    CHECK(matched.hidden() == width);
    CHECK(matched.parameter_count() >= spec.parameter_count());
    // Tight: one unit less would undershoot.
    const MlpSpec under{L, static_cast<double>(width - 1) / L};
    CHECK(under.parameter_count() < spec.parameter_count());
  }
}

TEST_CASE("v_zero control converges for backflow at desk scale") {
  TrainConfig cfg;
  cfg.init_scale = 1e-6;
  cfg.target_infidelity = 1e-10;
  cfg.restarts = 1;
  cfg.max_steps = 200;
  const EnsembleSummary summary = v_zero_control(4, 2, 5, AnsatzKind::kBackflow, cfg);
  CHECK(summary.n_included == 2);
  CHECK(summary.mean_infidelity < 1e-8);
}
