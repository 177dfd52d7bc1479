#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "chiralwg/types.hpp"

namespace chiralwg {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// layout validation
struct LayoutError : Error {
  using Error::Error;
};
struct UnknownAtomError : LayoutError {
  using LayoutError::LayoutError;
};
struct NegativeRateError : LayoutError {
  using LayoutError::LayoutError;
};
struct PhaseCountMismatchError : LayoutError {
  using LayoutError::LayoutError;
};
struct EmptyAtomError : LayoutError {
  using LayoutError::LayoutError;
};
// coincident points (equal rank) must have zero recorded phase between them,
// otherwise the closed-form coefficients and the cascade disagree
struct CoincidentPhaseError : LayoutError {
  using LayoutError::LayoutError;
};

// operator plumbing
struct DimensionError : Error {
  using Error::Error;
};
struct NonHermitianError : Error {
  using Error::Error;
};

// integration
struct StepSizeUnderflowError : Error {
  using Error::Error;
};
struct InvariantViolatedError : Error {
  using Error::Error;
};

// steady state: kernel dimension >= 2; carries the kernel basis, unresolved
struct DegenerateSteadyStateError : Error {
  DegenerateSteadyStateError(const std::string& what, std::vector<Matrix> basis)
      : Error(what), kernel_basis(std::move(basis)) {}
  std::vector<Matrix> kernel_basis;
};

// analysis
struct NotTwoAtomsError : Error {
  using Error::Error;
};
struct NoDrivenDarkStateError : Error {
  using Error::Error;
};

}  // namespace chiralwg
