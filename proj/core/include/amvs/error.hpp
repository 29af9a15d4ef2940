#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace amvs {

enum class ErrorCode {
  PointBehindCamera,
  NonPositiveDepth,
  SingularIntrinsics,
  InvalidCamera,
  ImageTooSmall,
  ResolutionMismatch,
  ShapeMismatch,
  NoSourceViews,
  NonPositiveTemperature,
  NonPositiveSigma,
  EmptyDepthMap,
  DegenerateRange,
  InsufficientData,
  InvalidCount,
  MissingPreviousStage,
  InsufficientViews,
  NoValidPixels,
  EmptyCloud,
  InvalidSpec,
  InvalidConfig,
  ParseError,
  UnsupportedVariant,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace amvs
