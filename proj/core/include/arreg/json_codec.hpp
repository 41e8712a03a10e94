#pragma once

// JSON encodings shared by the session file format and the wire protocol.

#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "arreg/frame.hpp"
#include "arreg/geometry.hpp"
#include "arreg/mesh.hpp"

namespace arreg::json_codec {

using Json = nlohmann::ordered_json;

/// A field that is missing or has the wrong shape.
class FieldError : public std::invalid_argument {
 public:
  FieldError(std::string field, const std::string& msg)
      : std::invalid_argument(field + ": " + msg), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Column-major 16-array.
Json pose_to_json(const RigidPose& pose);
RigidPose pose_from_json(const Json& value, const char* field = "pose");

Json rect_to_json(const Rect& r);
Rect rect_from_json(const Json& value, const char* field = "box");

Json pixel_to_json(const PixelPoint& p);

Json header_to_json(const SessionHeader& h);
/// Does not check format_version; the caller decides how to report it.
SessionHeader header_from_json(const Json& value);

/// Fields: seq, t_ms, pose, box | mask_rle, dof_label, angle_deg (null for NaN).
Json frame_to_json(const SessionFrame& f);
/// Unknown fields are ignored. A missing pose is reported as FieldError("pose").
SessionFrame frame_from_json(const Json& value);

}  // namespace arreg::json_codec
