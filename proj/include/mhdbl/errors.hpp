#pragma once

#include <stdexcept>
#include <string>

namespace mhdbl {

// Bad physical or numerical parameters supplied by the caller.
struct InvalidParameter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Evaluation point outside the domain where a formula is defined.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Linear algebra or time integration failure.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Files that cannot be read, written or parsed.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mhdbl
