// Copyright 2026 The nqslab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Disorder sampling and sparse Hamiltonian assembly for the two model
// families:
//
//   QSK:  H = sum_{i<j} J_ij sz_i sz_j - h sum_i sx_i     (full spin basis)
//   DF:   H = sum_{i<j} (J_ij c^dag_i c_j + h.c.) + sum_{i<j} V_ij n_i n_j
//                                                         (fixed-N sector)
//
// J and V are real symmetric with zero diagonal, entries N(0, sigma) with
// sigma defaulting to 1/sqrt(L).

#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "nqslab/basis.hpp"

namespace nqslab {

/// One draw of the coupling matrices, reproducible from (L, seed, sigma).
struct DisorderRealization {
  int L = 0;
  std::uint64_t seed = 0;
  double sigma = 0.0;
  Eigen::MatrixXd J;  // symmetric, zero diagonal
  Eigen::MatrixXd V;  // symmetric, zero diagonal
};

/// Transverse-field strength plus the coupling matrix of a realization.
struct QskParameters {
  double h = 1.0;  // > 0
  Eigen::MatrixXd J;

  int L() const { return static_cast<int>(J.rows()); }
};

enum class BasisTag { kSpinFull, kFermionSector };

/// Hermitian sparse operator in CSR layout over an ordered basis.
/// Immutable after assembly; concurrent matvecs over a shared operator are
/// safe.
class HamiltonianOperator {
 public:
  HamiltonianOperator(BasisTag tag, int L, int N, std::int64_t dimension)
      : basis_tag_(tag), L_(L), N_(N), dimension_(dimension) {
    row_offsets_.assign(1, 0);
  }

  BasisTag basis_tag() const { return basis_tag_; }
  int L() const { return L_; }
  /// Particle number for sector operators, -1 for spin operators.
  int N() const { return N_; }
  std::int64_t dimension() const { return dimension_; }
  std::int64_t nonzeros() const { return static_cast<std::int64_t>(cols_.size()); }

  /// Sparse matrix-vector product. Throws ContractViolation on length mismatch.
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;

  /// Dense copy; intended for diagonalization and tests.
  Eigen::MatrixXd to_dense() const;

  /// Row access for tests and assembly.
  struct Entry {
    std::int64_t col;
    double value;
  };
  std::vector<Entry> row(std::int64_t r) const;

  /// Appends one fully assembled row; rows must arrive in order, with
  /// column-sorted unique entries.
  void push_row(std::vector<Entry> entries);

 private:
  BasisTag basis_tag_;
  int L_;
  int N_;
  std::int64_t dimension_;
  std::vector<std::int64_t> row_offsets_;
  std::vector<std::int64_t> cols_;
  std::vector<double> values_;
};

/// Draws J and V with i.i.d. N(0, sigma^2) upper-triangle entries mirrored to
/// the lower triangle, zero diagonal. Deterministic given (L, seed, sigma).
DisorderRealization sample_disorder(int L, std::uint64_t seed, double sigma);

/// Same with the default width sigma = 1/sqrt(L).
DisorderRealization sample_disorder(int L, std::uint64_t seed);

/// Assembles the QSK operator over the full spin basis.
HamiltonianOperator build_qsk(const QskParameters& params, const SpinBasis& basis);

/// Assembles the DF operator over a fixed-N sector. Hopping uses
/// Jordan-Wigner signs and includes both c^dag_i c_j and c^dag_j c_i, so the
/// result is Hermitian and particle-number conserving by construction.
HamiltonianOperator build_df(const DisorderRealization& disorder, const FermionSector& sector);

/// Free-function form of HamiltonianOperator::apply.
Eigen::VectorXd apply_operator(const HamiltonianOperator& H, const Eigen::VectorXd& v);

}  // namespace nqslab
