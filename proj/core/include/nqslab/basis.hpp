// Copyright 2026 The nqslab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Hilbert-space bases over bitstring configurations.
//
// Conventions, fixed once and oracle-checked in the tests:
//   * bit i of the integer is site i (LSB = site 0);
//   * a set bit means "occupied" (fermions) or "spin up" (spins);
//   * Jordan-Wigner strings order sites 0 < 1 < ... < L-1.

#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <vector>

namespace nqslab {

/// Hard cap on the site count; keeps dense diagonalization at desk scale.
inline constexpr int kMaxSites = 20;

/// A computational-basis label: L bits, one per site.
struct Configuration {
  std::uint32_t bits = 0;
  int length = 0;

  bool occupied(int site) const { return (bits >> site) & 1u; }
  int popcount() const { return std::popcount(bits); }
  /// Input encoding shared by all ansatz families: bit 1 -> +1, bit 0 -> -1.
  double spin(int site) const { return occupied(site) ? 1.0 : -1.0; }

  friend bool operator==(const Configuration&, const Configuration&) = default;
};

/// The full 2^L z-basis, in increasing integer order.
struct SpinBasis {
  int L = 0;
  std::vector<std::uint32_t> states;

  std::int64_t size() const { return static_cast<std::int64_t>(states.size()); }
  Configuration config(std::int64_t k) const { return {states[static_cast<std::size_t>(k)], L}; }
};

/// The fixed-particle-number sector: all C(L, N) configurations with
/// popcount N, in increasing integer order.
struct FermionSector {
  int L = 0;
  int N = 0;
  std::vector<std::uint32_t> states;

  std::int64_t size() const { return static_cast<std::int64_t>(states.size()); }
  Configuration config(std::int64_t k) const { return {states[static_cast<std::size_t>(k)], L}; }

  /// Rank of `c` in enumeration order. Throws LookupError if `c` is not a
  /// member (wrong popcount or out of range).
  std::int64_t index_of(const Configuration& c) const;
};

/// A bipartition of the sites; the complement of `sites_a` is implied.
struct Bipartition {
  std::vector<int> sites_a;  // sorted, nonempty, proper subset of {0..L-1}
};

/// All 2^L configurations. Throws SizeLimitError unless 1 <= L <= kMaxSites.
SpinBasis enumerate_spin_basis(int L);

/// All C(L, N) configurations with popcount N. Throws DomainError if N < 0 or
/// N > L, SizeLimitError if L is out of range.
FermionSector enumerate_sector(int L, int N);

/// Result of applying c_i^dagger c_j to a basis configuration.
struct Hop {
  Configuration target;
  int sign;  // +1 or -1, the product of the two Jordan-Wigner parities
};

/// Applies c_i^dagger c_j (annihilate j first, then create at i) with
/// Jordan-Wigner signs. Returns nullopt when the move annihilates an empty
/// site or creates on an occupied one. Throws ContractViolation for i == j:
/// diagonal occupation terms are handled by n_i, not by hopping.
std::optional<Hop> apply_hopping_jw(const Configuration& c, int i, int j);

}  // namespace nqslab
