// Copyright 2026 The nqslab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Dense exact diagonalization, sector embedding, and Renyi-2 entanglement
// entropy. Entropies are in nats throughout.

#pragma once

#include <Eigen/Core>

#include "nqslab/basis.hpp"
#include "nqslab/models.hpp"

namespace nqslab {

/// Lowest eigenpair of a Hamiltonian. `amplitudes` is normalized and
/// sign-fixed: the first nonzero component is positive.
struct GroundState {
  double energy = 0.0;
  Eigen::VectorXd amplitudes;
  BasisTag basis_tag = BasisTag::kSpinFull;
  int L = 0;
  int N = -1;  // particle number for sector states, -1 otherwise
};

struct EntropyResult {
  double s2 = 0.0;  // Renyi-2 entropy, nats
  Bipartition bipartition;
  int L = 0;
};

/// Dense symmetric solve for the lowest eigenpair. Deterministic; throws
/// SizeLimitError above dimension 70000.
GroundState ground_state(const HamiltonianOperator& H);

/// Scatters sector amplitudes to their integer positions in the 2^L space.
Eigen::VectorXd embed_sector_vector(const Eigen::VectorXd& v, const FermionSector& sector);

/// Half-cut with the extra site on the A side: A = {0, ..., ceil(L/2)-1}.
Bipartition max_bipartition(int L);

/// Renyi-2 entropy of a normalized full-space state for bipartition A.
/// Convention: the A sites index the rows of the amplitude matrix, in
/// increasing site order. Throws ContractViolation if psi is not normalized
/// to 1 within 1e-10.
EntropyResult renyi2_entropy(const Eigen::VectorXd& psi, const Bipartition& a);

}  // namespace nqslab
