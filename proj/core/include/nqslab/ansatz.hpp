// Copyright 2026 The nqslab Authors
// SPDX-License-Identifier: Apache-2.0
//
// The two variational wavefunction families:
//
//  (i) two-layer perceptron, real parameters, tanh activation:
//        psi(c) = w2 . tanh(W1 x + b1) + b2
//      with the signed linear readout taken as the amplitude itself;
//
// (ii) neural backflow: a one-hidden-layer network with an N*L output head
//      added to fixed reference orbitals,
//        M(c)  = M0 + mat(W2 tanh(W1 x + b1) + b2)      (N x L, row-major)
//        psi(c) = det of the N columns of M(c) at the occupied sites of c,
//                 taken in increasing site order.
//
// Inputs are encoded x_i = +1 for an occupied site / up spin, -1 otherwise.
// Parameter vectors flatten in declaration order, matrices row-major.

#pragma once

#include <cstdint>
#include <memory>

#include <Eigen/Core>

#include "nqslab/basis.hpp"

namespace nqslab {

// ---------------------------------------------------------------------------
// Perceptron
// ---------------------------------------------------------------------------

struct MlpSpec {
  int L = 0;
  double alpha = 1.0;  // hidden-unit density; m = round(alpha * L), min 1

  int hidden() const;
  long long parameter_count() const;  // m*(L+2) + 1
};

struct MlpParameters {
  Eigen::MatrixXd W1;  // m x L
  Eigen::VectorXd b1;  // m
  Eigen::VectorXd w2;  // m
  double b2 = 0.0;

  Eigen::VectorXd to_flat() const;
  static MlpParameters from_flat(const MlpSpec& spec, const Eigen::VectorXd& flat);
};

/// Signed amplitude of one configuration.
double mlp_amplitude(const MlpParameters& p, const Configuration& c);

/// Exact gradient d psi / d theta, flattened in parameter order.
Eigen::VectorXd mlp_gradient(const MlpParameters& p, const Configuration& c);

// ---------------------------------------------------------------------------
// Neural backflow
// ---------------------------------------------------------------------------

struct BackflowSpec {
  int L = 0;
  int N = 0;       // particle number, 1 <= N <= L
  int hidden = 1;  // m >= 1
  Eigen::MatrixXd reference_orbitals;  // M0: N x L

  long long parameter_count() const;  // m*L + m + N*L*m + N*L
};

struct BackflowParameters {
  Eigen::MatrixXd W1;  // m x L
  Eigen::VectorXd b1;  // m
  Eigen::MatrixXd W2;  // (N*L) x m
  Eigen::VectorXd b2;  // N*L

  Eigen::VectorXd to_flat() const;
  static BackflowParameters from_flat(const BackflowSpec& spec, const Eigen::VectorXd& flat);
};

/// Slater-determinant amplitude with backflow orbitals. Throws
/// ContractViolation unless popcount(c) == spec.N.
double backflow_amplitude(const BackflowParameters& p, const BackflowSpec& spec,
                          const Configuration& c);

/// Exact gradient d psi / d theta. Near-singular determinants fall back to
/// the cofactor form, so the gradient stays finite when psi == 0.
Eigen::VectorXd backflow_gradient(const BackflowParameters& p, const BackflowSpec& spec,
                                  const Configuration& c);

/// d det(M) / dM, the cofactor matrix. Uses det * inv(M)^T when M is safely
/// invertible and explicit minors otherwise. Exposed for tests.
Eigen::MatrixXd determinant_gradient(const Eigen::MatrixXd& m, double* det_out = nullptr);

// ---------------------------------------------------------------------------
// Spec-level helpers
// ---------------------------------------------------------------------------

long long parameter_count(const MlpSpec& spec);
long long parameter_count(const BackflowSpec& spec);

/// Gaussian init, per-tensor std = scale / sqrt(fan-in); the backflow output
/// bias starts at zero so M(c) begins anchored at the reference orbitals.
/// Deterministic given the seed.
Eigen::VectorXd init_parameters(const MlpSpec& spec, std::uint64_t seed, double scale);
Eigen::VectorXd init_parameters(const BackflowSpec& spec, std::uint64_t seed, double scale);

/// Rows = the N lowest single-particle orbitals of a hopping matrix;
/// the mean-field reference for the fermionic models.
Eigen::MatrixXd hartree_fock_orbitals(const Eigen::MatrixXd& hopping, int n_particles);

/// Random orthonormal rows, the reference when no hopping matrix applies.
Eigen::MatrixXd random_orthonormal_rows(int n_rows, int n_cols, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Batched evaluation over a whole basis (full-summation training)
// ---------------------------------------------------------------------------

/// An ansatz bound to an ordered basis. amplitudes() returns psi for every
/// basis state in basis order; weighted_gradient_sum() returns
/// sum_s w_s dpsi(s)/dtheta, the only contraction fidelity optimization
/// needs. Both match the per-configuration functions exactly.
class WavefunctionModel {
 public:
  virtual ~WavefunctionModel() = default;

  virtual std::int64_t dimension() const = 0;
  virtual long long parameter_count() const = 0;
  virtual Eigen::VectorXd amplitudes(const Eigen::VectorXd& theta) const = 0;
  virtual Eigen::VectorXd weighted_gradient_sum(const Eigen::VectorXd& theta,
                                                const Eigen::VectorXd& weights) const = 0;
  virtual Eigen::VectorXd init_parameters(std::uint64_t seed, double scale) const = 0;
};

class MlpModel final : public WavefunctionModel {
 public:
  MlpModel(const MlpSpec& spec, const SpinBasis& basis);
  MlpModel(const MlpSpec& spec, const FermionSector& sector);

  const MlpSpec& spec() const { return spec_; }
  std::int64_t dimension() const override { return encoded_.rows(); }
  long long parameter_count() const override { return spec_.parameter_count(); }
  Eigen::VectorXd amplitudes(const Eigen::VectorXd& theta) const override;
  Eigen::VectorXd weighted_gradient_sum(const Eigen::VectorXd& theta,
                                        const Eigen::VectorXd& weights) const override;
  Eigen::VectorXd init_parameters(std::uint64_t seed, double scale) const override;

 private:
  MlpSpec spec_;
  Eigen::MatrixXd encoded_;  // dim x L, rows are +-1 encodings in basis order
};

class BackflowModel final : public WavefunctionModel {
 public:
  BackflowModel(BackflowSpec spec, const FermionSector& sector);

  const BackflowSpec& spec() const { return spec_; }
  std::int64_t dimension() const override { return encoded_.rows(); }
  long long parameter_count() const override { return spec_.parameter_count(); }
  Eigen::VectorXd amplitudes(const Eigen::VectorXd& theta) const override;
  Eigen::VectorXd weighted_gradient_sum(const Eigen::VectorXd& theta,
                                        const Eigen::VectorXd& weights) const override;
  Eigen::VectorXd init_parameters(std::uint64_t seed, double scale) const override;

 private:
  BackflowSpec spec_;
  Eigen::MatrixXd encoded_;                       // dim x L
  Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic> occupied_;  // dim x N, site lists
};

}  // namespace nqslab
