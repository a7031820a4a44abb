#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace semitoric {

enum class ErrorKind {
  ConstraintViolation,
  StepFailure,
  BadParameter,
  UnknownModel,
  InvalidConfig,
  NoConvergence,
  SingularValue,
  ReturnNotFound,
  EmptyGrid,
  PathThroughSingularValue,
  BranchAmbiguity,
  NotSimple,
  NonRationalEdge,
  NotFocusFocus,
  IllConditioned,
  SpreadTooLarge,
  BlockAmbiguity,
  NotALattice,
  TransportAmbiguity,
};

std::string_view error_name(ErrorKind kind);

// Validation errors come from bad input; everything else is a numeric failure.
bool is_validation_error(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view name() const { return error_name(kind_); }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace semitoric
