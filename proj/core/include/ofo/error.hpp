#pragma once

#include <stdexcept>
#include <string>

namespace ofo {

/// Operand sizes that do not agree (vector lengths, matrix shapes).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An argument lies outside the set an operation is defined on.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative procedure (settling, steady-state search) did not converge.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void require_same_dimension(long expected, long actual, const std::string& what);

}  // namespace ofo
