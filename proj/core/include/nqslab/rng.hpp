// Copyright 2026 The nqslab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

namespace nqslab {

/// One splitmix64 step; advances `state` and returns the next value.
std::uint64_t splitmix64(std::uint64_t& state);

/// Derives an independent child seed from a master seed and a stream index.
/// Used to give every disorder realization / restart its own stream so that
/// results do not depend on execution order or worker count.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Standard-normal sampler with a fully specified algorithm (mt19937_64 +
/// Marsaglia polar method). std::normal_distribution is implementation
/// defined, which would make "same seed, same matrices" fragile.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

  /// One N(0, 1) draw.
  double operator()();

 private:
  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace nqslab
