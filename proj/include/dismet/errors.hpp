#pragma once

#include <stdexcept>
#include <string>

namespace dismet {

enum class ErrorCode {
  MalformedFile,
  InvalidValue,
  LabelOutOfRange,
  DegenerateGrid,
  SingleLatent,
  KOutOfRange,
  AllLatentsUninformative,
  EmptyFactors,
  SingleFactor,
  TooLarge,
};

const char* to_string(ErrorCode code);

/// All library failures are reported through this exception type; the code
/// tells callers (and the CLI exit-code mapping) what class of failure it is.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedFile: return "MalformedFile";
    case ErrorCode::InvalidValue: return "InvalidValue";
    case ErrorCode::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::DegenerateGrid: return "DegenerateGrid";
    case ErrorCode::SingleLatent: return "SingleLatent";
    case ErrorCode::KOutOfRange: return "KOutOfRange";
    case ErrorCode::AllLatentsUninformative: return "AllLatentsUninformative";
    case ErrorCode::EmptyFactors: return "EmptyFactors";
    case ErrorCode::SingleFactor: return "SingleFactor";
    case ErrorCode::TooLarge: return "TooLarge";
  }
  return "Unknown";
}

}  // namespace dismet
