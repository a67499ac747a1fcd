#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace polarize {

enum class ErrorCode {
  MalformedLine,
  NegativeWeight,
  SelfLoop,
  DuplicateEdge,
  IndexOutOfRange,
  InvalidProbability,
  InvalidRange,
  InvalidArgument,
  Io,
  DimensionMismatch,
  EmptyVector,
  NoSuchEdge,
  InvalidBounds,
  NegativeTotal,
  ShapeMismatch,
  TooLarge,
  KTooLarge,
  SolverFailure,
  MaxIterationsExceeded,
  NoConvergence,
  NonFiniteObjective,
  BoundViolated,
};

std::string_view to_string(ErrorCode code);

// Process exit status for a failure of this kind:
// 2 parse/input, 3 dimension or feasibility, 4 solver, 5 internal assertion.
int exit_code(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace polarize
