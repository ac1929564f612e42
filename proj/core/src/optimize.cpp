// Copyright 2026 The nqslab Authors
// SPDX-License-Identifier: Apache-2.0

#include "nqslab/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nqslab/errors.hpp"
#include "nqslab/rng.hpp"

namespace nqslab {

namespace {

constexpr double kEnergyGuard = 1e-8;

void check_dims(const WavefunctionModel& model, const GroundState& target,
                const HamiltonianOperator& H) {
  if (model.dimension() != target.amplitudes.size() || model.dimension() != H.dimension()) {
    throw ContractViolation("train_fidelity: model, target and operator dimensions differ");
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (max_steps < 1) throw ConfigError("train: max_steps must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("train: learning_rate must be > 0");
  if (!(lr_decay > 0.0 && lr_decay <= 1.0)) {
    throw ConfigError("train: lr_decay must lie in (0, 1]");
  }
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw ConfigError("train: adam betas must lie in [0, 1)");
  }
  if (!(adam_eps > 0.0)) throw ConfigError("train: adam_eps must be > 0");
  if (!(target_infidelity > 0.0 && target_infidelity < 1.0)) {
    throw ConfigError("train: target_infidelity must lie in (0, 1)");
  }
  if (patience < 1) throw ConfigError("train: patience must be >= 1");
  if (restarts < 1) throw ConfigError("train: restarts must be >= 1");
  if (trace_stride < 1) throw ConfigError("train: trace_stride must be >= 1");
  if (!(init_scale > 0.0)) throw ConfigError("train: init_scale must be > 0");
  if (!(min_rel_improvement >= 0.0 && min_rel_improvement < 1.0)) {
    throw ConfigError("train: min_rel_improvement must lie in [0, 1)");
  }
}

void AdamState::update(Eigen::VectorXd& theta, const Eigen::VectorXd& grad,
                       const TrainConfig& cfg) {
  ++step;
  m = cfg.adam_beta1 * m + (1.0 - cfg.adam_beta1) * grad;
  v = cfg.adam_beta2 * v + (1.0 - cfg.adam_beta2) * grad.array().square().matrix();
  const double c1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(step));
  const double c2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(step));
  const double rate =
      cfg.learning_rate * std::pow(cfg.lr_decay, static_cast<double>(step - 1));
  theta.array() -= rate * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg.adam_eps);
}

Eigen::VectorXd batch_amplitudes(const WavefunctionModel& model, const Eigen::VectorXd& theta) {
  return model.amplitudes(theta);
}

double fidelity(const Eigen::VectorXd& psi, const Eigen::VectorXd& phi) {
  if (psi.size() != phi.size()) throw ContractViolation("fidelity: length mismatch");
  const double npsi = psi.squaredNorm();
  const double nphi = phi.squaredNorm();
  if (npsi == 0.0 || nphi == 0.0) throw DegenerateInputError("fidelity: zero vector");
  const double overlap = psi.dot(phi);
  return std::min(1.0, overlap * overlap / (npsi * nphi));
}

Eigen::VectorXd log_fidelity_gradient(const WavefunctionModel& model,
                                      const Eigen::VectorXd& theta,
                                      const Eigen::VectorXd& phi) {
  if (phi.size() != model.dimension()) {
    throw ContractViolation("log_fidelity_gradient: target length != model dimension");
  }
  if (phi.squaredNorm() == 0.0) {
    throw DegenerateInputError("log_fidelity_gradient: zero target");
  }
  const Eigen::VectorXd psi = model.amplitudes(theta);
  const double npsi = psi.squaredNorm();
  if (npsi == 0.0) throw DegenerateInputError("log_fidelity_gradient: zero ansatz state");
  const double overlap = psi.dot(phi);
  if (overlap == 0.0) {
    throw SignBlockedError("log_fidelity_gradient: ansatz exactly orthogonal to target");
  }
  return 2.0 * (model.weighted_gradient_sum(theta, phi) / overlap -
                model.weighted_gradient_sum(theta, psi) / npsi);
}

double variational_energy(const Eigen::VectorXd& psi, const HamiltonianOperator& H) {
  const double n = psi.squaredNorm();
  if (n == 0.0) throw DegenerateInputError("variational_energy: zero vector");
  return psi.dot(H.apply(psi)) / n;
}

double relative_energy_error(double E, double E0) {
  if (std::abs(E0) <= kEnergyGuard) {
    throw ExcludedRealizationError("relative_energy_error: |E0| <= " +
                                   std::to_string(kEnergyGuard));
  }
  return std::abs(E - E0) / std::abs(E0);
}

TrainResult train_fidelity(const WavefunctionModel& model, const GroundState& target,
                           const HamiltonianOperator& H, const TrainConfig& config,
                           std::uint64_t seed) {
  config.validate();
  check_dims(model, target, H);
  if (std::abs(target.energy) <= kEnergyGuard) {
    throw ExcludedRealizationError("train_fidelity: target |E0| <= 1e-8");
  }
  const Eigen::VectorXd& phi = target.amplitudes;
  const double nphi = phi.squaredNorm();
  if (nphi == 0.0) throw DegenerateInputError("train_fidelity: zero target state");

  TrainResult result;
  bool have_result = false;

  for (int restart = 0; restart < config.restarts; ++restart) {
    Eigen::VectorXd theta =
        model.init_parameters(derive_seed(seed, static_cast<std::uint64_t>(restart)),
                              config.init_scale);
    AdamState adam(theta.size());
    std::vector<TracePoint> trace;
    double run_best = 2.0;
    Eigen::VectorXd run_best_theta = theta;
    long long run_steps = 0;
    int since_improvement = 0;
    bool aborted = false;

    for (int step = 0; step < config.max_steps; ++step) {
      const Eigen::VectorXd psi = model.amplitudes(theta);
      const double npsi = psi.squaredNorm();
      const double overlap = psi.dot(phi);
      if (npsi == 0.0 || (overlap == 0.0 && step == 0)) {
        // Sign-blocked (or degenerate) start: abandon this seed, spend the
        // restart slot on the next derived seed.
        aborted = true;
        break;
      }
      const double infidelity = 1.0 - std::min(1.0, overlap * overlap / (npsi * nphi));

      if (infidelity < run_best * (1.0 - config.min_rel_improvement)) {
        since_improvement = 0;
      } else {
        ++since_improvement;
      }
      if (infidelity < run_best) {
        run_best = infidelity;
        run_best_theta = theta;
      }
      if (step % config.trace_stride == 0) {
        const double energy = psi.dot(H.apply(psi)) / npsi;
        trace.push_back({run_steps, infidelity, relative_energy_error(energy, target.energy)});
      }
      if (run_best < config.target_infidelity) break;
      if (since_improvement > config.patience) break;
      if (overlap == 0.0) {
        // Orthogonality mid-run: keep the best so far, stop this run.
        break;
      }

      const Eigen::VectorXd grad_lnf =
          2.0 * (model.weighted_gradient_sum(theta, phi) / overlap -
                 model.weighted_gradient_sum(theta, psi) / npsi);
      adam.update(theta, Eigen::VectorXd(-grad_lnf), config);
      ++run_steps;
    }

    result.steps_used += run_steps;
    ++result.restarts_used;
    if (aborted) continue;

    if (!have_result || run_best < result.final_infidelity) {
      have_result = true;
      result.final_infidelity = run_best;
      result.best_parameters = run_best_theta;
      result.trace = std::move(trace);
    }
    if (result.final_infidelity < config.target_infidelity) break;
  }

  if (!have_result) {
    throw SignBlockedError("train_fidelity: every restart started orthogonal to the target");
  }
  result.final_energy = variational_energy(model.amplitudes(result.best_parameters), H);
  result.relative_energy_error = relative_energy_error(result.final_energy, target.energy);
  return result;
}

}  // namespace nqslab
