#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace toch {

enum class ErrorCode {
  InvalidMesh,
  InvalidDirection,
  GridTooSmall,
  DegenerateConfiguration,
  ModelMismatch,
  InvalidSurfacePoint,
  InvalidEpsilon,
  WeightMismatch,
  InvalidInitialization,
  ShapeMismatch,
  PointSetMismatch,
  InvalidArgument,
  Io,
  Parse,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidMesh: return "InvalidMesh";
    case ErrorCode::InvalidDirection: return "InvalidDirection";
    case ErrorCode::GridTooSmall: return "GridTooSmall";
    case ErrorCode::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorCode::ModelMismatch: return "ModelMismatch";
    case ErrorCode::InvalidSurfacePoint: return "InvalidSurfacePoint";
    case ErrorCode::InvalidEpsilon: return "InvalidEpsilon";
    case ErrorCode::WeightMismatch: return "WeightMismatch";
    case ErrorCode::InvalidInitialization: return "InvalidInitialization";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::PointSetMismatch: return "PointSetMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

/// Every failure surfaced by the library carries one of the codes above so
/// the CLI can print a stable, machine-parsable prefix.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace toch
