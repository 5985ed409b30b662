#pragma once

#include <stdexcept>
#include <string>

namespace qpencil {

// Caller-supplied data is malformed: bad shapes, failed validation, bad files.
struct InputError : std::runtime_error {
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Structurally valid request outside the supported size/cost envelope.
struct CapabilityError : std::runtime_error {
  explicit CapabilityError(const std::string& what) : std::runtime_error(what) {}
};

// An iteration failed to converge or an internal cross-check tripped.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Orthonormalization hit a dependent column; carries the failing index.
struct DependentColumnError : InputError {
  int column;
  DependentColumnError(int col, const std::string& what)
      : InputError(what), column(col) {}
};

}  // namespace qpencil
