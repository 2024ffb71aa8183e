#pragma once

#include <stdexcept>
#include <string>

namespace fuchs {

enum class ErrorKind {
  InvalidArgument,
  NonGenericElement,
  ResonantSystem,
  InvalidSystem,
  TooCloseToPuncture,
  ClearanceViolation,
  StepSizeUnderflow,
  NoConvergence,
  TooManyPoints,
  UnsupportedDegree,
  IllConditionedSplit,
  NonTransversal,
  BoundaryCheckFailed,
  Io,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonGenericElement: return "NonGenericElement";
    case ErrorKind::ResonantSystem: return "ResonantSystem";
    case ErrorKind::InvalidSystem: return "InvalidSystem";
    case ErrorKind::TooCloseToPuncture: return "TooCloseToPuncture";
    case ErrorKind::ClearanceViolation: return "ClearanceViolation";
    case ErrorKind::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::TooManyPoints: return "TooManyPoints";
    case ErrorKind::UnsupportedDegree: return "UnsupportedDegree";
    case ErrorKind::IllConditionedSplit: return "IllConditionedSplit";
    case ErrorKind::NonTransversal: return "NonTransversal";
    case ErrorKind::BoundaryCheckFailed: return "BoundaryCheckFailed";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace fuchs
