// Copyright 2026 The nqslab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Microbenchmarks for the hot paths: Hamiltonian assembly, dense ground
// states, batched ansatz evaluation, gradient accumulation, and entropy.

#include <cstdint>

#include <benchmark/benchmark.h>
#include <Eigen/Dense>

#include "nqslab/ansatz.hpp"
#include "nqslab/basis.hpp"
#include "nqslab/exact.hpp"
#include "nqslab/models.hpp"
#include "nqslab/optimize.hpp"
#include "nqslab/rng.hpp"

namespace {

using namespace nqslab;

constexpr std::uint64_t kSeed = 7;

void BM_BuildDf(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  const DisorderRealization d = sample_disorder(L, kSeed);
  const FermionSector sector = enumerate_sector(L, L / 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_df(d, sector));
  }
}
BENCHMARK(BM_BuildDf)->Arg(8)->Arg(10)->Arg(12);

void BM_BuildQsk(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  const DisorderRealization d = sample_disorder(L, kSeed);
  const SpinBasis basis = enumerate_spin_basis(L);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_qsk({1.0, d.J}, basis));
  }
}
BENCHMARK(BM_BuildQsk)->Arg(8)->Arg(10)->Arg(12);

void BM_GroundState(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  const DisorderRealization d = sample_disorder(L, kSeed);
  const HamiltonianOperator H = build_df(d, enumerate_sector(L, L / 2));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ground_state(H));
  }
}
BENCHMARK(BM_GroundState)->Arg(8)->Arg(10)->Arg(12);

void BM_MlpAmplitudes(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  MlpSpec spec;
  spec.L = L;
  spec.alpha = 2.0;
  const MlpModel model(spec, enumerate_spin_basis(L));
  const Eigen::VectorXd theta = model.init_parameters(kSeed, 0.05);
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.amplitudes(theta));
  }
}
BENCHMARK(BM_MlpAmplitudes)->Arg(8)->Arg(10)->Arg(12);

void BM_BackflowAmplitudes(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  const DisorderRealization d = sample_disorder(L, kSeed);
  BackflowSpec spec;
  spec.L = L;
  spec.N = L / 2;
  spec.hidden = L;
  spec.reference_orbitals = hartree_fock_orbitals(d.J, spec.N);
  const FermionSector sector = enumerate_sector(L, spec.N);
  const BackflowModel model(std::move(spec), sector);
  const Eigen::VectorXd theta = model.init_parameters(kSeed, 0.05);
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.amplitudes(theta));
  }
}
BENCHMARK(BM_BackflowAmplitudes)->Arg(8)->Arg(10)->Arg(12);

void BM_MlpWeightedGradientSum(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  MlpSpec spec;
  spec.L = L;
  spec.alpha = 2.0;
  const MlpModel model(spec, enumerate_spin_basis(L));
  const Eigen::VectorXd theta = model.init_parameters(kSeed, 0.05);
  GaussianSampler gauss(kSeed);
  Eigen::VectorXd weights(model.dimension());
  for (Eigen::Index i = 0; i < weights.size(); ++i) weights(i) = gauss();
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.weighted_gradient_sum(theta, weights));
  }
}
BENCHMARK(BM_MlpWeightedGradientSum)->Arg(8)->Arg(10);

void BM_BackflowWeightedGradientSum(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  const DisorderRealization d = sample_disorder(L, kSeed);
  BackflowSpec spec;
  spec.L = L;
  spec.N = L / 2;
  spec.hidden = L;
  spec.reference_orbitals = hartree_fock_orbitals(d.J, spec.N);
  const FermionSector sector = enumerate_sector(L, spec.N);
  const BackflowModel model(std::move(spec), sector);
  const Eigen::VectorXd theta = model.init_parameters(kSeed, 0.05);
  GaussianSampler gauss(kSeed);
  Eigen::VectorXd weights(model.dimension());
  for (Eigen::Index i = 0; i < weights.size(); ++i) weights(i) = gauss();
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.weighted_gradient_sum(theta, weights));
  }
}
BENCHMARK(BM_BackflowWeightedGradientSum)->Arg(8)->Arg(10);

void BM_Renyi2(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  GaussianSampler gauss(kSeed);
  Eigen::VectorXd psi(1 << L);
  for (Eigen::Index i = 0; i < psi.size(); ++i) psi(i) = gauss();
  psi.normalize();
  const Bipartition cut = max_bipartition(L);
  for (auto _ : state) {
    benchmark::DoNotOptimize(renyi2_entropy(psi, cut));
  }
}
BENCHMARK(BM_Renyi2)->Arg(10)->Arg(12)->Arg(14);

}  // namespace

BENCHMARK_MAIN();
