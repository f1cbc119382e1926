#pragma once

#include <stdexcept>
#include <string>

namespace ssbm {

enum class ErrorCode {
  kMalformedLine,
  kConflictingSign,
  kEmptyInput,
  kIo,
  kInvalidConfig,
  kInfeasibleConfig,
  kLengthMismatch,
  kDegenerateModel,
  kZeroMass,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedLine: return "MalformedLine";
    case ErrorCode::kConflictingSign: return "ConflictingSign";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kInfeasibleConfig: return "InfeasibleConfig";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kDegenerateModel: return "DegenerateModel";
    case ErrorCode::kZeroMass: return "ZeroMass";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ssbm
