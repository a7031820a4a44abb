#include "semitoric/error.hpp"

namespace semitoric {

std::string_view error_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConstraintViolation: return "ConstraintViolation";
    case ErrorKind::StepFailure: return "StepFailure";
    case ErrorKind::BadParameter: return "BadParameter";
    case ErrorKind::UnknownModel: return "UnknownModel";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::SingularValue: return "SingularValue";
    case ErrorKind::ReturnNotFound: return "ReturnNotFound";
    case ErrorKind::EmptyGrid: return "EmptyGrid";
    case ErrorKind::PathThroughSingularValue: return "PathThroughSingularValue";
    case ErrorKind::BranchAmbiguity: return "BranchAmbiguity";
    case ErrorKind::NotSimple: return "NotSimple";
    case ErrorKind::NonRationalEdge: return "NonRationalEdge";
    case ErrorKind::NotFocusFocus: return "NotFocusFocus";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::SpreadTooLarge: return "SpreadTooLarge";
    case ErrorKind::BlockAmbiguity: return "BlockAmbiguity";
    case ErrorKind::NotALattice: return "NotALattice";
    case ErrorKind::TransportAmbiguity: return "TransportAmbiguity";
  }
  return "Unknown";
}

bool is_validation_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConstraintViolation:
    case ErrorKind::BadParameter:
    case ErrorKind::UnknownModel:
    case ErrorKind::InvalidConfig:
      return true;
    default:
      return false;
  }
}

}  // namespace semitoric
