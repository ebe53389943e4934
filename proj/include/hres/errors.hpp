#pragma once

#include <stdexcept>
#include <string>

namespace hres {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation
/// (non-positive dilation factor, |mu| >= n for rho, divergent tail, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Invalid model or chart configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed to reach its tolerance or was ill-conditioned.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace hres
