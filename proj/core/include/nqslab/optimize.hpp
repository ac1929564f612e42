// Copyright 2026 The nqslab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Full-summation fidelity optimization toward an exact target state.
//
// The loss is -ln F with F = (psi.phi)^2 / ((psi.psi)(phi.phi)); its exact
// gradient only needs two weighted gradient sums per step:
//
//   d/dtheta ln F = 2 [ (sum_s dpsi_s phi_s)/(psi.phi)
//                     - (sum_s dpsi_s psi_s)/(psi.psi) ].
//
// Training is plain Adam with independent restarts, early stopping on a
// target infidelity, and a patience rule for plateaus.

#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "nqslab/ansatz.hpp"
#include "nqslab/exact.hpp"
#include "nqslab/models.hpp"

namespace nqslab {

struct TrainConfig {
  int max_steps = 50000;
  double learning_rate = 1e-2;
  double lr_decay = 1.0;  // per-step multiplicative decay; 1 = constant rate
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double target_infidelity = 1e-3;
  int patience = 2000;       // steps without improvement before stopping
  int restarts = 3;          // independent init seeds; best run wins
  int trace_stride = 50;     // steps between trace samples
  double init_scale = 0.05;  // passed to init_parameters
  // An improvement resets patience only when the best infidelity drops by
  // this relative amount; filters numerical jitter on plateaus.
  double min_rel_improvement = 1e-3;

  /// Throws ConfigError on an invalid field combination.
  void validate() const;
};

struct AdamState {
  Eigen::VectorXd m;  // first moment
  Eigen::VectorXd v;  // second moment
  long long step = 0;

  explicit AdamState(Eigen::Index n)
      : m(Eigen::VectorXd::Zero(n)), v(Eigen::VectorXd::Zero(n)) {}

  /// One in-place descent update on `theta` given the loss gradient.
  void update(Eigen::VectorXd& theta, const Eigen::VectorXd& grad, const TrainConfig& cfg);
};

struct TracePoint {
  long long step = 0;                 // step count within the traced run
  double infidelity = 1.0;
  double rel_energy_error = 0.0;
};

struct TrainResult {
  double final_infidelity = 1.0;       // best infidelity reached
  double final_energy = 0.0;           // variational energy at best parameters
  double relative_energy_error = 0.0;  // |E - E0| / |E0| at best parameters
  long long steps_used = 0;            // total Adam steps across all restarts
  int restarts_used = 0;
  Eigen::VectorXd best_parameters;
  std::vector<TracePoint> trace;       // samples from the best restart
};

/// Amplitudes of every basis state in basis order.
Eigen::VectorXd batch_amplitudes(const WavefunctionModel& model, const Eigen::VectorXd& theta);

/// F = (psi.phi)^2 / ((psi.psi)(phi.phi)), clamped to [0, 1].
/// Throws DegenerateInputError when either vector is zero.
double fidelity(const Eigen::VectorXd& psi, const Eigen::VectorXd& phi);

/// Exact gradient of ln F at `theta` toward target `phi`.
/// Throws SignBlockedError when psi.phi == 0 (caller re-seeds),
/// DegenerateInputError when psi or phi is the zero vector.
Eigen::VectorXd log_fidelity_gradient(const WavefunctionModel& model,
                                      const Eigen::VectorXd& theta,
                                      const Eigen::VectorXd& phi);

/// E = (psi^T H psi) / (psi^T psi). Throws DegenerateInputError on zero psi.
double variational_energy(const Eigen::VectorXd& psi, const HamiltonianOperator& H);

/// |E - E0| / |E0|. Throws ExcludedRealizationError when |E0| <= 1e-8.
double relative_energy_error(double E, double E0);

/// Runs `restarts` Adam descents on -ln F from seeds derived from `seed` and
/// returns the best. Stops a run at target_infidelity or after `patience`
/// steps without relative improvement; skips remaining restarts once the
/// target is reached. Sign-blocked initializations are re-seeded and count
/// against the restart budget. Deterministic given (config, seed).
/// Throws ExcludedRealizationError when |target.energy| <= 1e-8.
TrainResult train_fidelity(const WavefunctionModel& model, const GroundState& target,
                           const HamiltonianOperator& H, const TrainConfig& config,
                           std::uint64_t seed);

}  // namespace nqslab
