// Copyright 2026 The nqslab Authors
// SPDX-License-Identifier: Apache-2.0

#include "nqslab/exact.hpp"

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <lapacke.h>

#include "nqslab/errors.hpp"

namespace nqslab {

namespace {

constexpr std::int64_t kMaxDenseDimension = 70000;

/// Fixes the global sign so the first nonzero amplitude is positive.
void fix_sign(Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) {
      if (v[i] < 0.0) v = -v;
      return;
    }
  }
}

}  // namespace

GroundState ground_state(const HamiltonianOperator& H) {
  const std::int64_t n = H.dimension();
  if (n > kMaxDenseDimension) {
    throw SizeLimitError("dimension " + std::to_string(n) + " exceeds dense-solve cap " +
                         std::to_string(kMaxDenseDimension));
  }
  Eigen::MatrixXd dense = H.to_dense();
  const auto ln = static_cast<lapack_int>(n);
  std::vector<double> eigenvalues(static_cast<std::size_t>(n));
  Eigen::VectorXd vec(n);
  std::vector<lapack_int> isuppz(2);
  lapack_int found = 0;
  // dsyevr with an index range computes only the lowest eigenpair; the
  // reduction is still a dense tridiagonalization, deterministic run to run.
  const lapack_int info = LAPACKE_dsyevr(
      LAPACK_COL_MAJOR, 'V', 'I', 'L', ln, dense.data(), ln,
      /*vl=*/0.0, /*vu=*/0.0, /*il=*/1, /*iu=*/1, /*abstol=*/0.0, &found,
      eigenvalues.data(), vec.data(), ln, isuppz.data());
  if (info != 0 || found < 1) {
    throw Error("dsyevr failed with info=" + std::to_string(info));
  }
  vec.normalize();
  fix_sign(vec);
  GroundState gs;
  gs.energy = eigenvalues[0];
  gs.amplitudes = std::move(vec);
  gs.basis_tag = H.basis_tag();
  gs.L = H.L();
  gs.N = H.N();
  return gs;
}

Eigen::VectorXd embed_sector_vector(const Eigen::VectorXd& v, const FermionSector& sector) {
  if (v.size() != sector.size()) {
    throw ContractViolation("embed_sector_vector: length " + std::to_string(v.size()) +
                            " != sector size " + std::to_string(sector.size()));
  }
  Eigen::VectorXd full = Eigen::VectorXd::Zero(std::int64_t{1} << sector.L);
  for (std::int64_t k = 0; k < sector.size(); ++k) {
    full[sector.states[static_cast<std::size_t>(k)]] = v[k];
  }
  return full;
}

Bipartition max_bipartition(int L) {
  if (L < 2) throw ContractViolation("max_bipartition requires L >= 2");
  Bipartition a;
  a.sites_a.resize(static_cast<std::size_t>((L + 1) / 2));
  std::iota(a.sites_a.begin(), a.sites_a.end(), 0);
  return a;
}

EntropyResult renyi2_entropy(const Eigen::VectorXd& psi, const Bipartition& a) {
  // Infer L from the vector length.
  const auto dim = static_cast<std::uint64_t>(psi.size());
  int L = 0;
  while ((std::uint64_t{1} << L) < dim && L <= kMaxSites) ++L;
  if (dim < 4 || (std::uint64_t{1} << L) != dim) {
    throw ContractViolation("renyi2_entropy expects a full-space vector of length 2^L, L >= 2");
  }
  if (a.sites_a.empty() || static_cast<int>(a.sites_a.size()) >= L) {
    throw ContractViolation("bipartition must be a nonempty proper subset of the sites");
  }
  if (std::abs(psi.norm() - 1.0) > 1e-10) {
    throw ContractViolation("renyi2_entropy requires a normalized state");
  }

  const int na = static_cast<int>(a.sites_a.size());
  const int nb = L - na;
  std::vector<int> sites_b;
  sites_b.reserve(static_cast<std::size_t>(nb));
  {
    std::uint32_t mask_a = 0;
    for (int site : a.sites_a) mask_a |= (1u << site);
    for (int site = 0; site < L; ++site) {
      if (!(mask_a >> site & 1u)) sites_b.push_back(site);
    }
  }

  // Amplitude matrix M[row, col]: row collects the A bits (increasing site
  // order), col the complement bits.
  Eigen::MatrixXd m(std::int64_t{1} << na, std::int64_t{1} << nb);
  for (std::uint64_t s = 0; s < dim; ++s) {
    std::uint64_t row = 0;
    for (int k = 0; k < na; ++k) row |= ((s >> a.sites_a[static_cast<std::size_t>(k)]) & 1u) << k;
    std::uint64_t col = 0;
    for (int k = 0; k < nb; ++k) col |= ((s >> sites_b[static_cast<std::size_t>(k)]) & 1u) << k;
    m(static_cast<std::int64_t>(row), static_cast<std::int64_t>(col)) = psi[static_cast<std::int64_t>(s)];
  }

  // Tr[(M M^T)^2] = |M M^T|_F^2; contract over the smaller side.
  double purity = 0.0;
  if (m.rows() <= m.cols()) {
    purity = (m * m.transpose()).squaredNorm();
  } else {
    purity = (m.transpose() * m).squaredNorm();
  }
  EntropyResult result;
  result.s2 = std::max(0.0, -std::log(purity));
  result.bipartition = a;
  result.L = L;
  return result;
}

}  // namespace nqslab
