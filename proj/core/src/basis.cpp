// Copyright 2026 The nqslab Authors
// SPDX-License-Identifier: Apache-2.0

#include "nqslab/basis.hpp"

#include <algorithm>
#include <string>

#include "nqslab/errors.hpp"

namespace nqslab {

namespace {

void check_site_count(int L) {
  if (L < 1 || L > kMaxSites) {
    throw SizeLimitError("site count L=" + std::to_string(L) + " outside [1, " +
                         std::to_string(kMaxSites) + "]");
  }
}

/// Parity of the occupation count strictly below `site`.
int jw_parity(std::uint32_t bits, int site) {
  const std::uint32_t mask = (site == 0) ? 0u : ((1u << site) - 1u);
  return (std::popcount(bits & mask) & 1) ? -1 : 1;
}

}  // namespace

SpinBasis enumerate_spin_basis(int L) {
  check_site_count(L);
  SpinBasis basis;
  basis.L = L;
  const std::uint64_t dim = std::uint64_t{1} << L;
  basis.states.resize(dim);
  for (std::uint64_t s = 0; s < dim; ++s) basis.states[s] = static_cast<std::uint32_t>(s);
  return basis;
}

FermionSector enumerate_sector(int L, int N) {
  check_site_count(L);
  if (N < 0 || N > L) {
    throw DomainError("particle number N=" + std::to_string(N) + " outside [0, L=" +
                      std::to_string(L) + "]");
  }
  FermionSector sector;
  sector.L = L;
  sector.N = N;
  if (N == 0) {
    sector.states.push_back(0u);
    return sector;
  }
  // Gosper's hack walks popcount-N integers in increasing order.
  const std::uint32_t limit = (L == 32) ? ~0u : ((1u << L) - 1u);
  std::uint32_t v = (1u << N) - 1u;
  while (v <= limit) {
    sector.states.push_back(v);
    const std::uint32_t t = v | (v - 1u);
    if (t == ~0u) break;
    v = (t + 1u) | (((~t & (t + 1u)) - 1u) >> (std::countr_zero(v) + 1));
  }
  return sector;
}

std::int64_t FermionSector::index_of(const Configuration& c) const {
  const auto it = std::lower_bound(states.begin(), states.end(), c.bits);
  if (it == states.end() || *it != c.bits) {
    throw LookupError("configuration " + std::to_string(c.bits) + " not in (L=" +
                      std::to_string(L) + ", N=" + std::to_string(N) + ") sector");
  }
  return static_cast<std::int64_t>(it - states.begin());
}

std::optional<Hop> apply_hopping_jw(const Configuration& c, int i, int j) {
  if (i == j) {
    throw ContractViolation("hopping requires i != j; diagonal terms are n_i, not c^dag_i c_i");
  }
  if (!c.occupied(j) || c.occupied(i)) return std::nullopt;
  // Annihilate at j first, then create at i, picking up one JW parity each.
  int sign = jw_parity(c.bits, j);
  const std::uint32_t after_annihilation = c.bits & ~(1u << j);
  sign *= jw_parity(after_annihilation, i);
  return Hop{Configuration{after_annihilation | (1u << i), c.length}, sign};
}

}  // namespace nqslab
