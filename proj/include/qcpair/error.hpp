/**
 * @file error.hpp
 * @brief Error codes and the exception type thrown by every qcpair module.
 */
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qcpair {

enum class ErrorCode {
  DegenerateQuadruple,
  DegenerateTriple,
  DegenerateSet,
  DegenerateMap,
  InfinityNotSupported,
  InvalidRegion,
  InvalidScene,
  PointNotInterior,
  IncompatibleModel,
  EndpointInsideU,
  Unreachable,
  SnapFailed,
  TooFewSamples,
  NotMonotone,
  NotAnchored,
  NotIncreasing,
  NotOrientationPreserving,
  CellDistortionTooLarge,
  PreconditionSpread,
  RadiusOutOfRange,
  LogRatioViolation,
  OriginExcluded,
  WrongSideOfLine,
  ImageInsideDisk,
  QuadratureRangeExceeded,
  DegenerateTriangle,
  StepTooLarge,
  NotARing,
  SolverDiverged,
  NotPositive,
  AlphaOutOfRange,
  BandViolation,
  BadRadii,
  EmptyLayer,
  InvalidArgument,
};

inline constexpr std::string_view to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::DegenerateQuadruple: return "DegenerateQuadruple";
    case ErrorCode::DegenerateTriple: return "DegenerateTriple";
    case ErrorCode::DegenerateSet: return "DegenerateSet";
    case ErrorCode::DegenerateMap: return "DegenerateMap";
    case ErrorCode::InfinityNotSupported: return "InfinityNotSupported";
    case ErrorCode::InvalidRegion: return "InvalidRegion";
    case ErrorCode::InvalidScene: return "InvalidScene";
    case ErrorCode::PointNotInterior: return "PointNotInterior";
    case ErrorCode::IncompatibleModel: return "IncompatibleModel";
    case ErrorCode::EndpointInsideU: return "EndpointInsideU";
    case ErrorCode::Unreachable: return "Unreachable";
    case ErrorCode::SnapFailed: return "SnapFailed";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::NotMonotone: return "NotMonotone";
    case ErrorCode::NotAnchored: return "NotAnchored";
    case ErrorCode::NotIncreasing: return "NotIncreasing";
    case ErrorCode::NotOrientationPreserving: return "NotOrientationPreserving";
    case ErrorCode::CellDistortionTooLarge: return "CellDistortionTooLarge";
    case ErrorCode::PreconditionSpread: return "PreconditionSpread";
    case ErrorCode::RadiusOutOfRange: return "RadiusOutOfRange";
    case ErrorCode::LogRatioViolation: return "LogRatioViolation";
    case ErrorCode::OriginExcluded: return "OriginExcluded";
    case ErrorCode::WrongSideOfLine: return "WrongSideOfLine";
    case ErrorCode::ImageInsideDisk: return "ImageInsideDisk";
    case ErrorCode::QuadratureRangeExceeded: return "QuadratureRangeExceeded";
    case ErrorCode::DegenerateTriangle: return "DegenerateTriangle";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::NotARing: return "NotARing";
    case ErrorCode::SolverDiverged: return "SolverDiverged";
    case ErrorCode::NotPositive: return "NotPositive";
    case ErrorCode::AlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorCode::BandViolation: return "BandViolation";
    case ErrorCode::BadRadii: return "BadRadii";
    case ErrorCode::EmptyLayer: return "EmptyLayer";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace qcpair
