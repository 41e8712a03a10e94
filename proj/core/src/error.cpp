#include "arreg/error.hpp"

namespace arreg {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::BehindCamera: return "BehindCamera";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::TruncatedChunk: return "TruncatedChunk";
    case ErrorCode::MissingPositions: return "MissingPositions";
    case ErrorCode::UnsupportedEncoding: return "UnsupportedEncoding";
    case ErrorCode::EmptyMesh: return "EmptyMesh";
    case ErrorCode::NoHeadDetected: return "NoHeadDetected";
    case ErrorCode::RleLengthMismatch: return "RleLengthMismatch";
    case ErrorCode::InvalidMask: return "InvalidMask";
    case ErrorCode::NonRigidPose: return "NonRigidPose";
    case ErrorCode::DegenerateModelBox: return "DegenerateModelBox";
    case ErrorCode::RangeError: return "RangeError";
    case ErrorCode::DegenerateGroundTruth: return "DegenerateGroundTruth";
    case ErrorCode::BothEmpty: return "BothEmpty";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::FormatVersionMismatch: return "FormatVersionMismatch";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::NonMonotonicSeq: return "NonMonotonicSeq";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::ModelLoad: return "ModelLoad";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace arreg
