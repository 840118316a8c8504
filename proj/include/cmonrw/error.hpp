#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cmonrw {

enum class ErrorCode {
  SyntaxError,
  UnknownGenerator,
  TypeMismatch,
  InvalidSignature,
  UnknownNode,
  NotASubhypergraph,
  InterfaceMismatch,
  NotDiscrete,
  NotRightMonogamous,
  Cyclic,
  ContainsGenerator,
  NotTerminal,
  PartitionMismatch,
  MissingCut,
  NotConvex,
  InvalidUpDownSignature,
  InvalidInOutSignature,
  IncompatibleGluing,
  BadInterfaceOrder,
  DanglingEdge,
  ResultNotRightMonogamous,
  StepBudgetExhausted,
  BoundTooSmall,
  MalformedDocument,
  IoFailure,
  Usage,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownGenerator: return "UnknownGenerator";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::InvalidSignature: return "InvalidSignature";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::NotASubhypergraph: return "NotASubhypergraph";
    case ErrorCode::InterfaceMismatch: return "InterfaceMismatch";
    case ErrorCode::NotDiscrete: return "NotDiscrete";
    case ErrorCode::NotRightMonogamous: return "NotRightMonogamous";
    case ErrorCode::Cyclic: return "Cyclic";
    case ErrorCode::ContainsGenerator: return "ContainsGenerator";
    case ErrorCode::NotTerminal: return "NotTerminal";
    case ErrorCode::PartitionMismatch: return "PartitionMismatch";
    case ErrorCode::MissingCut: return "MissingCut";
    case ErrorCode::NotConvex: return "NotConvex";
    case ErrorCode::InvalidUpDownSignature: return "InvalidUpDownSignature";
    case ErrorCode::InvalidInOutSignature: return "InvalidInOutSignature";
    case ErrorCode::IncompatibleGluing: return "IncompatibleGluing";
    case ErrorCode::BadInterfaceOrder: return "BadInterfaceOrder";
    case ErrorCode::DanglingEdge: return "DanglingEdge";
    case ErrorCode::ResultNotRightMonogamous: return "ResultNotRightMonogamous";
    case ErrorCode::StepBudgetExhausted: return "StepBudgetExhausted";
    case ErrorCode::BoundTooSmall: return "BoundTooSmall";
    case ErrorCode::MalformedDocument: return "MalformedDocument";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::Usage: return "Usage";
  }
  return "Unknown";
}

/// Domain error raised by every library module. `location` is free-form
/// (e.g. "line 3, column 7" or "node 4") and may be empty.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string location = {})
      : std::runtime_error(message), code_(code), location_(std::move(location)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& location() const noexcept { return location_; }

 private:
  ErrorCode code_;
  std::string location_;
};

}  // namespace cmonrw
