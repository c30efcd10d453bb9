#pragma once

#include <stdexcept>
#include <string>

namespace polargate {

// Input outside an operation's mathematical domain (r <= 0, zero gap, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed configuration, file or label.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical precondition failed (non-Hermitian generator, non-unitary
// propagator, unconverged quadrature).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace polargate
