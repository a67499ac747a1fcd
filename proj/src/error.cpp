#include "polarize/error.hpp"

namespace polarize {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::InvalidProbability: return "InvalidProbability";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyVector: return "EmptyVector";
    case ErrorCode::NoSuchEdge: return "NoSuchEdge";
    case ErrorCode::InvalidBounds: return "InvalidBounds";
    case ErrorCode::NegativeTotal: return "NegativeTotal";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::MaxIterationsExceeded: return "MaxIterationsExceeded";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NonFiniteObjective: return "NonFiniteObjective";
    case ErrorCode::BoundViolated: return "BoundViolated";
  }
  return "Unknown";
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedLine:
    case ErrorCode::NegativeWeight:
    case ErrorCode::SelfLoop:
    case ErrorCode::DuplicateEdge:
    case ErrorCode::IndexOutOfRange:
    case ErrorCode::InvalidProbability:
    case ErrorCode::InvalidRange:
    case ErrorCode::InvalidArgument:
    case ErrorCode::Io:
      return 2;
    case ErrorCode::DimensionMismatch:
    case ErrorCode::EmptyVector:
    case ErrorCode::NoSuchEdge:
    case ErrorCode::InvalidBounds:
    case ErrorCode::NegativeTotal:
    case ErrorCode::ShapeMismatch:
    case ErrorCode::TooLarge:
    case ErrorCode::KTooLarge:
      return 3;
    case ErrorCode::SolverFailure:
    case ErrorCode::MaxIterationsExceeded:
    case ErrorCode::NoConvergence:
    case ErrorCode::NonFiniteObjective:
      return 4;
    case ErrorCode::BoundViolated:
      return 5;
  }
  return 5;
}

}  // namespace polarize
