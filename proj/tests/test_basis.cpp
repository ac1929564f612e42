// Copyright 2026 The nqslab Authors
// SPDX-License-Identifier: Apache-2.0

#include "nqslab/basis.hpp"

#include <cstdint>
#include <vector>

#include <doctest.h>

#include "nqslab/errors.hpp"
#include "oracles.hpp"

using namespace nqslab;

TEST_CASE("spin basis enumerates all bitstrings in order") {
  const SpinBasis b1 = enumerate_spin_basis(1);
  CHECK(b1.states == std::vector<std::uint32_t>{0, 1});

  const SpinBasis b2 = enumerate_spin_basis(2);
  CHECK(b2.states == std::vector<std::uint32_t>{0, 1, 2, 3});

  const SpinBasis b12 = enumerate_spin_basis(12);
  REQUIRE(b12.size() == 4096);
  for (std::int64_t k = 1; k < b12.size(); ++k) {
    CHECK(b12.states[static_cast<std::size_t>(k - 1)] < b12.states[static_cast<std::size_t>(k)]);
  }

  CHECK_THROWS_AS(enumerate_spin_basis(0), SizeLimitError);
  CHECK_THROWS_AS(enumerate_spin_basis(kMaxSites + 1), SizeLimitError);
}

TEST_CASE("fermion sector enumerates fixed-popcount states") {
  const FermionSector s = enumerate_sector(4, 2);
  CHECK(s.states == std::vector<std::uint32_t>{0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100});

  const FermionSector vacuum = enumerate_sector(4, 0);
  CHECK(vacuum.states == std::vector<std::uint32_t>{0});

  CHECK(enumerate_sector(12, 6).size() == 924);

  CHECK_THROWS_AS(enumerate_sector(4, 5), DomainError);
  CHECK_THROWS_AS(enumerate_sector(4, -1), DomainError);
}

TEST_CASE("sector rank lookup") {
  const FermionSector s = enumerate_sector(4, 2);
  CHECK(s.index_of({0b0011, 4}) == 0);
  CHECK(s.index_of({0b1100, 4}) == 5);
  CHECK_THROWS_AS(s.index_of({0b0111, 4}), LookupError);

  for (std::int64_t k = 0; k < s.size(); ++k) CHECK(s.index_of(s.config(k)) == k);
}

TEST_CASE("configuration helpers") {
  const Configuration c{0b1001, 4};
  CHECK(c.popcount() == 2);
  CHECK(c.occupied(0));
  CHECK_FALSE(c.occupied(1));
  CHECK(c.spin(0) == 1.0);
  CHECK(c.spin(2) == -1.0);
}

TEST_CASE("hopping on pinned examples") {
  // Sites 0 and 3 occupied; move the site-3 particle to site 1.
  const Configuration c{0b1001, 4};
  const auto hop = apply_hopping_jw(c, 1, 3);
  REQUIRE(hop.has_value());
  CHECK(hop->target.bits == 0b0011);
  CHECK(hop->sign == 1);

  CHECK_THROWS_AS(apply_hopping_jw({0b0010, 4}, 1, 1), ContractViolation);

  CHECK_FALSE(apply_hopping_jw({0b0100, 4}, 0, 1).has_value());  // site 1 empty
  CHECK_FALSE(apply_hopping_jw({0b0011, 4}, 1, 0).has_value());  // site 1 occupied
}

TEST_CASE("hopping matches the dense Jordan-Wigner oracle exhaustively") {
  for (int L = 2; L <= 6; ++L) {
    const int dim = 1 << L;
    for (int i = 0; i < L; ++i) {
      for (int j = 0; j < L; ++j) {
        if (i == j) continue;
        const Eigen::MatrixXd op =
            testing::jw_annihilation(L, i).transpose() * testing::jw_annihilation(L, j);
        for (int k = 0; k < dim; ++k) {
          const auto hop = apply_hopping_jw({static_cast<std::uint32_t>(k), L}, i, j);
          if (hop.has_value()) {
            CHECK(op(hop->target.bits, k) == static_cast<double>(hop->sign));
          } else {
            CHECK(op.col(k).isZero(0.0));
          }
        }
      }
    }
  }
}

TEST_CASE("hermitian-conjugate hops carry the same sign") {
  for (int L = 2; L <= 6; ++L) {
    const int dim = 1 << L;
    for (int i = 0; i < L; ++i) {
      for (int j = 0; j < L; ++j) {
        if (i == j) continue;
        for (int k = 0; k < dim; ++k) {
          const auto hop = apply_hopping_jw({static_cast<std::uint32_t>(k), L}, i, j);
          if (!hop.has_value()) continue;
          const auto back = apply_hopping_jw(hop->target, j, i);
          REQUIRE(back.has_value());
          CHECK(back->target.bits == static_cast<std::uint32_t>(k));
          CHECK(back->sign == hop->sign);
        }
      }
    }
  }
}
