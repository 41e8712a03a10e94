#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace arreg {

/// Every failure the library reports carries one of these codes so callers
/// (the CLI exit-code mapping, the wire protocol) can branch without
/// string matching.
enum class ErrorCode {
  // geometry
  DomainError,
  BehindCamera,
  Singular,
  // mesh / glb
  BadMagic,
  UnsupportedVersion,
  TruncatedChunk,
  MissingPositions,
  UnsupportedEncoding,
  EmptyMesh,
  // segmentation
  NoHeadDetected,
  RleLengthMismatch,
  InvalidMask,
  // registration
  NonRigidPose,
  DegenerateModelBox,
  RangeError,
  // evaluation
  DegenerateGroundTruth,
  BothEmpty,
  EmptyInput,
  // session io
  FormatVersionMismatch,
  MalformedLine,
  NonMonotonicSeq,
  ConfigError,
  // models / io
  ModelLoad,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by the session reader; carries the 1-based line number.
class MalformedLineError : public Error {
 public:
  MalformedLineError(std::size_t line_no, const std::string& detail)
      : Error(ErrorCode::MalformedLine,
              "line " + std::to_string(line_no) + ": " + detail),
        line_no_(line_no) {}

  std::size_t line_no() const noexcept { return line_no_; }

 private:
  std::size_t line_no_;
};

}  // namespace arreg
