#include "amvs/error.hpp"

namespace amvs {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::PointBehindCamera: return "PointBehindCamera";
    case ErrorCode::NonPositiveDepth: return "NonPositiveDepth";
    case ErrorCode::SingularIntrinsics: return "SingularIntrinsics";
    case ErrorCode::InvalidCamera: return "InvalidCamera";
    case ErrorCode::ImageTooSmall: return "ImageTooSmall";
    case ErrorCode::ResolutionMismatch: return "ResolutionMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NoSourceViews: return "NoSourceViews";
    case ErrorCode::NonPositiveTemperature: return "NonPositiveTemperature";
    case ErrorCode::NonPositiveSigma: return "NonPositiveSigma";
    case ErrorCode::EmptyDepthMap: return "EmptyDepthMap";
    case ErrorCode::DegenerateRange: return "DegenerateRange";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::InvalidCount: return "InvalidCount";
    case ErrorCode::MissingPreviousStage: return "MissingPreviousStage";
    case ErrorCode::InsufficientViews: return "InsufficientViews";
    case ErrorCode::NoValidPixels: return "NoValidPixels";
    case ErrorCode::EmptyCloud: return "EmptyCloud";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnsupportedVariant: return "UnsupportedVariant";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace amvs
