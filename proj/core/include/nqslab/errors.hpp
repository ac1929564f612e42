// Copyright 2026 The nqslab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace nqslab {

/// Base class for all nqslab errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A requested size exceeds what dense exact diagonalization can handle.
class SizeLimitError : public Error {
 public:
  using Error::Error;
};

/// An argument violates a stated precondition (dimension mismatch, i == j, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// A configuration is not a member of the basis it was looked up in.
class LookupError : public Error {
 public:
  using Error::Error;
};

/// An argument is outside the mathematical domain (e.g. N > L).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A vector that must be nonzero (or normalized) is not.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// Too few data points for the requested fit.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// A disorder realization whose |E0| is too small for relative errors;
/// such realizations are flagged and reported, never silently dropped.
class ExcludedRealizationError : public Error {
 public:
  using Error::Error;
};

/// The initial ansatz state is exactly orthogonal to the target.
class SignBlockedError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration (CLI usage errors map to nonzero exit).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace nqslab
