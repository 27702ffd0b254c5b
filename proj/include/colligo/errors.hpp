#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace colligo {

enum class ErrorCode {
  NotPSD,
  Inconsistent,
  Singular,
  SingularResolvent,
  DimensionMismatch,
  Pole,
  NotObservable,
  NotContraction,
  NotUnitary,
  NotCoisometric,
  ParameterNotIsometric,
  SaturationFailure,
  KernelDimMismatch,
  InvalidInput,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::Inconsistent: return "Inconsistent";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::SingularResolvent: return "SingularResolvent";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::Pole: return "Pole";
    case ErrorCode::NotObservable: return "NotObservable";
    case ErrorCode::NotContraction: return "NotContraction";
    case ErrorCode::NotUnitary: return "NotUnitary";
    case ErrorCode::NotCoisometric: return "NotCoisometric";
    case ErrorCode::ParameterNotIsometric: return "ParameterNotIsometric";
    case ErrorCode::SaturationFailure: return "SaturationFailure";
    case ErrorCode::KernelDimMismatch: return "KernelDimMismatch";
    case ErrorCode::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI) can branch on the kind of failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        message_(message) {}

  ErrorCode code() const { return code_; }
  /// The message without the code prefix.
  const std::string& message() const { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace colligo
