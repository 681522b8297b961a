#pragma once

#include <stdexcept>
#include <string>

namespace hoc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid model or configuration input (bad parameter, unknown key, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine failed to deliver its contract (solver breakdown,
/// quadrature non-convergence, singular stencil, ...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace hoc
