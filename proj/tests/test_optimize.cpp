// Copyright 2026 The nqslab Authors
// SPDX-License-Identifier: Apache-2.0

#include "nqslab/optimize.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

#include <doctest.h>
#include <Eigen/Dense>

#include "nqslab/ansatz.hpp"
#include "nqslab/basis.hpp"
#include "nqslab/errors.hpp"
#include "nqslab/exact.hpp"
#include "nqslab/models.hpp"
#include "nqslab/rng.hpp"
#include "oracles.hpp"

using namespace nqslab;

namespace {

Eigen::VectorXd random_vector(Eigen::Index n, std::uint64_t seed) {
  GaussianSampler g(seed);
  Eigen::VectorXd v(n);
  for (Eigen::Index k = 0; k < n; ++k) v(k) = g();
  return v;
}

}  // namespace

TEST_CASE("fidelity pinned values") {
  Eigen::VectorXd a(3);
  a << 1.0, 2.0, -1.0;
  CHECK(fidelity(a, a) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(fidelity(3.0 * a, a) == doctest::Approx(1.0).epsilon(1e-15));

  Eigen::VectorXd b(3);
  b << 2.0, -1.0, 0.0;  // orthogonal to a
  CHECK(a.dot(b) == 0.0);
  CHECK(fidelity(a, b) == 0.0);

  CHECK_THROWS_AS(fidelity(Eigen::VectorXd::Zero(3), a), DegenerateInputError);
  CHECK_THROWS_AS(fidelity(a, Eigen::VectorXd::Zero(3)), DegenerateInputError);
}

TEST_CASE("fidelity is scale invariant and clamped to [0,1]") {
  GaussianSampler g(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd psi = random_vector(8, 100u + static_cast<std::uint64_t>(trial));
    const Eigen::VectorXd phi = random_vector(8, 200u + static_cast<std::uint64_t>(trial));
    const double f = fidelity(psi, phi);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
    const double c = 0.1 + std::abs(g());
    CHECK(fidelity(c * psi, phi) == doctest::Approx(f).epsilon(1e-12));
    CHECK(fidelity(psi, -c * phi) == doctest::Approx(f).epsilon(1e-12));
  }
}

TEST_CASE("log-fidelity gradient pinned properties") {
  const MlpSpec spec{3, 2.0};
  const SpinBasis basis = enumerate_spin_basis(3);
  const MlpModel model(spec, basis);
  const Eigen::VectorXd theta = model.init_parameters(17, 0.3);

  // At F = 1 (target equals the model's own state) the gradient vanishes.
  const Eigen::VectorXd self = batch_amplitudes(model, theta);
  const Eigen::VectorXd at_max = log_fidelity_gradient(model, theta, self);
  CHECK(at_max.norm() <= 1e-10 * std::max(1.0, self.norm()));

  // Invariance under target rescaling.
  const Eigen::VectorXd phi = random_vector(basis.size(), 3);
  const Eigen::VectorXd g1 = log_fidelity_gradient(model, theta, phi);
  const Eigen::VectorXd g2 = log_fidelity_gradient(model, theta, -2.5 * phi);
  CHECK((g1 - g2).norm() <= 1e-12 * std::max(1.0, g1.norm()));

  CHECK_THROWS_AS(log_fidelity_gradient(model, theta, Eigen::VectorXd::Zero(basis.size())),
                  DegenerateInputError);
}

TEST_CASE("log-fidelity gradient matches finite differences") {
  int instances = 0;

  // MLP over QSK-sized spin bases.
  for (const int L : {2, 3, 4}) {
    const MlpSpec spec{L, 2.0};
    const SpinBasis basis = enumerate_spin_basis(L);
    const MlpModel model(spec, basis);
    for (int rep = 0; rep < 10; ++rep) {
      const auto seed = static_cast<std::uint64_t>(10 * L + rep);
      const Eigen::VectorXd theta = model.init_parameters(seed, 0.4);
      const Eigen::VectorXd phi = random_vector(basis.size(), 1000u + seed);
      const auto f = [&](const Eigen::VectorXd& t) {
        return std::log(fidelity(batch_amplitudes(model, t), phi));
      };
      const Eigen::VectorXd analytic = log_fidelity_gradient(model, theta, phi);
      // Small step: ln F turns stiff when the two states are nearly orthogonal.
      const Eigen::VectorXd reference = testing::fd_gradient(f, theta, 1e-7);
      CHECK(testing::gradient_rel_error(analytic, reference) < 1e-5);
      ++instances;
    }
  }

  // Backflow over fermion sectors.
  for (const int L : {3, 4, 5}) {
    const int N = L / 2 > 0 ? L / 2 : 1;
    const FermionSector sector = enumerate_sector(L, N);
    BackflowSpec spec;
    spec.L = L;
    spec.N = N;
    spec.hidden = 2;
    spec.reference_orbitals = random_orthonormal_rows(N, L, static_cast<std::uint64_t>(L));
    const BackflowModel model(spec, sector);
    for (int rep = 0; rep < 10; ++rep) {
      const auto seed = static_cast<std::uint64_t>(20 * L + rep);
      const Eigen::VectorXd theta = model.init_parameters(seed, 0.4);
      const Eigen::VectorXd phi = random_vector(sector.size(), 2000u + seed);
      const auto f = [&](const Eigen::VectorXd& t) {
        return std::log(fidelity(batch_amplitudes(model, t), phi));
      };
      const Eigen::VectorXd analytic = log_fidelity_gradient(model, theta, phi);
      const Eigen::VectorXd reference = testing::fd_gradient(f, theta, 1e-7);
      CHECK(testing::gradient_rel_error(analytic, reference) < 1e-5);
      ++instances;
    }
  }
  CHECK(instances >= 50);
}

TEST_CASE("batch_amplitudes pinned values") {
  const MlpSpec spec{3, 1.0};
  const SpinBasis basis = enumerate_spin_basis(3);
  const MlpModel model(spec, basis);

  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(spec.parameter_count());
  CHECK(batch_amplitudes(model, zero).isZero(0.0));

  Eigen::VectorXd constant_head = zero;
  constant_head(constant_head.size() - 1) = 1.0;  // b2 is the last flat slot
  const Eigen::VectorXd psi = batch_amplitudes(model, constant_head);
  CHECK((psi - Eigen::VectorXd::Ones(basis.size())).norm() == 0.0);
}

TEST_CASE("variational energy pinned values") {
  DisorderRealization d;
  d.L = 2;
  d.J = Eigen::MatrixXd::Zero(2, 2);
  d.J(0, 1) = d.J(1, 0) = 0.5;
  d.V = Eigen::MatrixXd::Zero(2, 2);
  const HamiltonianOperator H = build_df(d, enumerate_sector(2, 1));

  Eigen::VectorXd basis_state(2);
  basis_state << 1.0, 0.0;
  CHECK(variational_energy(basis_state, H) == doctest::Approx(0.0).epsilon(1e-15));

  const GroundState gs = ground_state(H);
  CHECK(variational_energy(gs.amplitudes, H) == doctest::Approx(gs.energy).epsilon(1e-10));

  CHECK_THROWS_AS(variational_energy(Eigen::VectorXd::Zero(2), H), DegenerateInputError);
}

TEST_CASE("variational bound holds on random vectors") {
  const DisorderRealization d = sample_disorder(6, 99);
  const HamiltonianOperator H = build_df(d, enumerate_sector(6, 3));
  const GroundState gs = ground_state(H);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::VectorXd psi =
        random_vector(H.dimension(), 5000u + static_cast<std::uint64_t>(trial));
    CHECK(variational_energy(psi, H) >= gs.energy - 1e-10);
  }
}

TEST_CASE("relative energy error pinned values") {
  CHECK(relative_energy_error(-1.0, -1.0) == 0.0);
  CHECK(relative_energy_error(-0.99, -1.0) == doctest::Approx(0.01).epsilon(1e-12));
  CHECK_THROWS_AS(relative_energy_error(0.5, 0.0), ExcludedRealizationError);
}

TEST_CASE("adam first step moves by the learning rate against the gradient sign") {
  // With zero moments and bias correction, the first update is
  // lr * g / (|g| + eps'), i.e. almost exactly lr * sign(g).
  TrainConfig cfg;
  cfg.learning_rate = 0.1;
  Eigen::VectorXd theta(2);
  theta << 1.0, -2.0;
  AdamState adam(2);
  adam.update(theta, 2.0 * Eigen::Vector2d(1.0, -2.0), cfg);
  CHECK(theta(0) == doctest::Approx(0.9).epsilon(1e-6));
  CHECK(theta(1) == doctest::Approx(-1.9).epsilon(1e-6));
  CHECK(adam.step == 1);
}

TEST_CASE("adam with decay settles a quadratic") {
  TrainConfig cfg;
  cfg.learning_rate = 0.05;
  cfg.lr_decay = 0.998;
  Eigen::VectorXd theta(2);
  theta << 1.0, -2.0;
  AdamState adam(2);
  for (int step = 0; step < 2000; ++step) {
    const Eigen::VectorXd grad = 2.0 * theta;  // d/dtheta |theta|^2
    adam.update(theta, grad, cfg);
  }
  CHECK(theta.norm() < 1e-2);
  CHECK(adam.step == 2000);
}

TEST_CASE("train config validation") {
  TrainConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.max_steps = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = TrainConfig{};
  cfg.learning_rate = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = TrainConfig{};
  cfg.lr_decay = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = TrainConfig{};
  cfg.restarts = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = TrainConfig{};
  cfg.init_scale = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("exactly representable target converges in at most one step") {
  // Free-fermion instance with exact reference orbitals: the backflow model
  // starts next to the optimum when the network is initialized near zero.
  const int L = 6;
  const int N = 3;
  DisorderRealization d = sample_disorder(L, 1234);
  d.V.setZero();
  const FermionSector sector = enumerate_sector(L, N);
  const HamiltonianOperator H = build_df(d, sector);
  const GroundState gs = ground_state(H);

  BackflowSpec spec;
  spec.L = L;
  spec.N = N;
  spec.hidden = 2;
  spec.reference_orbitals = hartree_fock_orbitals(d.J, N);
  const BackflowModel model(spec, sector);

  TrainConfig cfg;
  cfg.init_scale = 1e-8;
  cfg.restarts = 1;
  cfg.target_infidelity = 1e-10;
  const TrainResult result = train_fidelity(model, gs, H, cfg, 7);
  CHECK(result.final_infidelity < 1e-10);
  CHECK(result.steps_used <= 1);
}

TEST_CASE("training reaches the QSK threshold at desk scale") {
  const int L = 6;
  const DisorderRealization d = sample_disorder(L, 2);
  const SpinBasis basis = enumerate_spin_basis(L);
  const HamiltonianOperator H = build_qsk({1.0, d.J}, basis);
  const GroundState gs = ground_state(H);
  const MlpModel model({L, 2.0}, basis);

  const TrainConfig cfg;
  const TrainResult result = train_fidelity(model, gs, H, cfg, 11);
  CHECK(result.final_infidelity < 1e-3);
  CHECK(result.relative_energy_error >= 0.0);
  CHECK(result.final_energy >= gs.energy - 1e-10);

  // Trace semantics: step-labeled, best-so-far never increases by much more
  // than jitter; the running minimum is non-increasing by construction.
  REQUIRE(!result.trace.empty());
  double best = result.trace.front().infidelity;
  for (const TracePoint& point : result.trace) {
    best = std::min(best, point.infidelity);
    CHECK(point.step >= 0);
    CHECK(point.infidelity >= 0.0);
  }
  CHECK(best <= result.trace.front().infidelity);
}

TEST_CASE("training is deterministic") {
  const int L = 4;
  const DisorderRealization d = sample_disorder(L, 3);
  const SpinBasis basis = enumerate_spin_basis(L);
  const HamiltonianOperator H = build_qsk({1.0, d.J}, basis);
  const GroundState gs = ground_state(H);
  const MlpModel model({L, 2.0}, basis);

  TrainConfig cfg;
  cfg.max_steps = 300;
  cfg.restarts = 2;
  const TrainResult a = train_fidelity(model, gs, H, cfg, 21);
  const TrainResult b = train_fidelity(model, gs, H, cfg, 21);
  CHECK(a.final_infidelity == b.final_infidelity);
  CHECK(a.final_energy == b.final_energy);
  CHECK(a.steps_used == b.steps_used);
  CHECK((a.best_parameters - b.best_parameters).norm() == 0.0);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t k = 0; k < a.trace.size(); ++k) {
    CHECK(a.trace[k].infidelity == b.trace[k].infidelity);
  }
}

TEST_CASE("variational consistency near convergence") {
  // Whenever training reaches very high fidelity, the energy error must be
  // small as well.
  const int L = 6;
  const int N = 3;
  DisorderRealization d = sample_disorder(L, 77);
  d.V.setZero();
  const FermionSector sector = enumerate_sector(L, N);
  const HamiltonianOperator H = build_df(d, sector);
  const GroundState gs = ground_state(H);

  BackflowSpec spec;
  spec.L = L;
  spec.N = N;
  spec.hidden = 2;
  spec.reference_orbitals = hartree_fock_orbitals(d.J, N);
  const BackflowModel model(spec, sector);

  TrainConfig cfg;
  cfg.init_scale = 1e-6;
  cfg.restarts = 1;
  cfg.target_infidelity = 1e-8;
  const TrainResult result = train_fidelity(model, gs, H, cfg, 3);
  REQUIRE(result.final_infidelity < 1e-6);
  CHECK(result.relative_energy_error < 1e-2);
}

TEST_CASE("excluded realization guard") {
  // A zero Hamiltonian has E0 = 0 and must be flagged, not divided by.
  DisorderRealization d;
  d.L = 2;
  d.J = Eigen::MatrixXd::Zero(2, 2);
  d.V = Eigen::MatrixXd::Zero(2, 2);
  const FermionSector sector = enumerate_sector(2, 1);
  const HamiltonianOperator H = build_df(d, sector);
  const GroundState gs = ground_state(H);
  REQUIRE(std::abs(gs.energy) <= 1e-8);

  BackflowSpec spec;
  spec.L = 2;
  spec.N = 1;
  spec.hidden = 1;
  spec.reference_orbitals = random_orthonormal_rows(1, 2, 4);
  const BackflowModel model(spec, sector);
  CHECK_THROWS_AS(train_fidelity(model, gs, H, TrainConfig{}, 5), ExcludedRealizationError);
}
