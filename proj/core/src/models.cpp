// Copyright 2026 The nqslab Authors
// SPDX-License-Identifier: Apache-2.0

#include "nqslab/models.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nqslab/errors.hpp"
#include "nqslab/rng.hpp"

namespace nqslab {

Eigen::VectorXd HamiltonianOperator::apply(const Eigen::VectorXd& v) const {
  if (v.size() != dimension_) {
    throw ContractViolation("apply: vector length " + std::to_string(v.size()) +
                            " != operator dimension " + std::to_string(dimension_));
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dimension_);
  for (std::int64_t r = 0; r < dimension_; ++r) {
    double acc = 0.0;
    for (std::int64_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      acc += values_[k] * v[cols_[k]];
    }
    out[r] = acc;
  }
  return out;
}

Eigen::MatrixXd HamiltonianOperator::to_dense() const {
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(dimension_, dimension_);
  for (std::int64_t r = 0; r < dimension_; ++r) {
    for (std::int64_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      dense(r, cols_[k]) = values_[k];
    }
  }
  return dense;
}

std::vector<HamiltonianOperator::Entry> HamiltonianOperator::row(std::int64_t r) const {
  std::vector<Entry> entries;
  entries.reserve(row_offsets_[r + 1] - row_offsets_[r]);
  for (std::int64_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
    entries.push_back({cols_[k], values_[k]});
  }
  return entries;
}

void HamiltonianOperator::push_row(std::vector<Entry> entries) {
  for (const Entry& e : entries) {
    cols_.push_back(e.col);
    values_.push_back(e.value);
  }
  row_offsets_.push_back(static_cast<std::int64_t>(cols_.size()));
}

DisorderRealization sample_disorder(int L, std::uint64_t seed, double sigma) {
  if (L < 2) throw ContractViolation("sample_disorder requires L >= 2");
  if (!(sigma > 0.0)) throw ContractViolation("sample_disorder requires sigma > 0");
  DisorderRealization d;
  d.L = L;
  d.seed = seed;
  d.sigma = sigma;
  d.J = Eigen::MatrixXd::Zero(L, L);
  d.V = Eigen::MatrixXd::Zero(L, L);
  GaussianSampler gauss(seed);
  // Row-major upper triangle, J first, then V; the serialization format
  // follows the same order.
  for (int i = 0; i < L; ++i) {
    for (int j = i + 1; j < L; ++j) {
      const double x = sigma * gauss();
      d.J(i, j) = x;
      d.J(j, i) = x;
    }
  }
  for (int i = 0; i < L; ++i) {
    for (int j = i + 1; j < L; ++j) {
      const double x = sigma * gauss();
      d.V(i, j) = x;
      d.V(j, i) = x;
    }
  }
  return d;
}

DisorderRealization sample_disorder(int L, std::uint64_t seed) {
  if (L < 2) throw ContractViolation("sample_disorder requires L >= 2");
  return sample_disorder(L, seed, 1.0 / std::sqrt(static_cast<double>(L)));
}

HamiltonianOperator build_qsk(const QskParameters& params, const SpinBasis& basis) {
  if (params.L() != basis.L) {
    throw ContractViolation("build_qsk: coupling matrix is " + std::to_string(params.L()) +
                            " sites, basis is " + std::to_string(basis.L));
  }
  if (!(params.h >= 0.0)) throw ContractViolation("build_qsk requires h >= 0");
  const int L = basis.L;
  HamiltonianOperator H(BasisTag::kSpinFull, L, -1, basis.size());
  std::vector<HamiltonianOperator::Entry> entries;
  for (std::int64_t r = 0; r < basis.size(); ++r) {
    const std::uint32_t s = basis.states[static_cast<std::size_t>(r)];
    entries.clear();
    // sx_i flips bit i; the flipped integer differs from s only in that bit,
    // so columns s ^ (1 << i) are distinct and the diagonal slots in by value.
    double diag = 0.0;
    for (int i = 0; i < L; ++i) {
      const double si = ((s >> i) & 1u) ? 1.0 : -1.0;
      for (int j = i + 1; j < L; ++j) {
        const double sj = ((s >> j) & 1u) ? 1.0 : -1.0;
        diag += params.J(i, j) * si * sj;
      }
      entries.push_back({static_cast<std::int64_t>(s ^ (1u << i)), -params.h});
    }
    entries.push_back({r, diag});
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.col < b.col; });
    H.push_row(std::move(entries));
  }
  return H;
}

HamiltonianOperator build_df(const DisorderRealization& disorder, const FermionSector& sector) {
  if (disorder.L != sector.L) {
    throw ContractViolation("build_df: disorder is " + std::to_string(disorder.L) +
                            " sites, sector is " + std::to_string(sector.L));
  }
  const int L = sector.L;
  HamiltonianOperator H(BasisTag::kFermionSector, L, sector.N, sector.size());
  std::vector<HamiltonianOperator::Entry> entries;
  for (std::int64_t r = 0; r < sector.size(); ++r) {
    const Configuration c = sector.config(r);
    entries.clear();
    double diag = 0.0;
    for (int i = 0; i < L; ++i) {
      if (!c.occupied(i)) continue;
      for (int j = i + 1; j < L; ++j) {
        if (c.occupied(j)) diag += disorder.V(i, j);
      }
    }
    // Hopping: for each pair exactly one direction applies per row, and the
    // Hermitian-conjugate entry lands in the partner row with the same sign.
    for (int i = 0; i < L; ++i) {
      for (int j = i + 1; j < L; ++j) {
        if (c.occupied(j) == c.occupied(i)) continue;
        const auto hop = c.occupied(j) ? apply_hopping_jw(c, i, j) : apply_hopping_jw(c, j, i);
        entries.push_back({sector.index_of(hop->target), disorder.J(i, j) * hop->sign});
      }
    }
    entries.push_back({r, diag});
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.col < b.col; });
    H.push_row(std::move(entries));
  }
  return H;
}

Eigen::VectorXd apply_operator(const HamiltonianOperator& H, const Eigen::VectorXd& v) {
  return H.apply(v);
}

}  // namespace nqslab
