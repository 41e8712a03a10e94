#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "arreg/geometry.hpp"
#include "arreg/mesh.hpp"

namespace arreg {

enum class DofLabel { Pitch, Yaw, Roll, Static };

std::string_view to_string(DofLabel dof) noexcept;
std::optional<DofLabel> parse_dof(std::string_view text) noexcept;

/// Run-length encoded segmentation mask as carried on the wire.
struct MaskRle {
  int w = 0;
  int h = 0;
  std::vector<std::uint32_t> runs;

  friend bool operator==(const MaskRle&, const MaskRle&) = default;
};

struct SessionHeader {
  int format_version = 1;
  int image_w = 640;
  int image_h = 480;
  double fov_v_deg = kDefaultFovDeg;
  std::string model_ref = "builtin:head-ellipsoid";
  std::string notes;

  friend bool operator==(const SessionHeader&, const SessionHeader&) = default;
};

/// One tracking sample. At most one of box / mask_rle is set.
struct SessionFrame {
  std::int64_t seq = 0;
  double t_ms = 0.0;
  std::optional<RigidPose> pose;
  std::optional<Rect> box;
  std::optional<MaskRle> mask_rle;
  DofLabel dof_label = DofLabel::Static;
  /// Ground-truth rotation for synthetic sessions; NaN for live captures.
  double angle_deg = std::numeric_limits<double>::quiet_NaN();
};

}  // namespace arreg
