#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "arreg/mesh.hpp"

namespace arreg {

/// Single-channel head confidence mask, row-major, values in [0, 1].
class SegMask {
 public:
  /// Throws Error{InvalidMask} on size mismatch or out-of-range values.
  SegMask(int width, int height, std::vector<float> confidences);

  static SegMask filled(int width, int height, float value);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  float at(int x, int y) const noexcept { return conf_[static_cast<std::size_t>(y) * width_ + x]; }
  std::span<const float> confidences() const noexcept { return conf_; }

 private:
  int width_;
  int height_;
  std::vector<float> conf_;
};

inline constexpr double kDefaultMaskThreshold = 0.5;
inline constexpr int kDefaultMinComponentPx = 64;

/// Binarizes at `threshold` (confidence >= threshold is foreground), labels
/// 4-connected components and returns the pixel-edge bounds of the largest
/// component with at least `min_component_px` pixels. Equal sizes go to the
/// component met first in row-major order.
/// Throws Error{NoHeadDetected}.
Rect mask_to_box(const SegMask& mask, double threshold = kDefaultMaskThreshold,
                 int min_component_px = kDefaultMinComponentPx);

/// Run-length encoding, row-major, alternating background/foreground and
/// starting with background (possibly a zero-length run).
std::vector<std::uint32_t> encode_rle(const SegMask& mask, double threshold = kDefaultMaskThreshold);

/// Throws Error{RleLengthMismatch} when the runs do not cover width*height.
SegMask decode_rle(int width, int height, std::span<const std::uint32_t> runs);

Rect box_from_rle(int width, int height, std::span<const std::uint32_t> runs,
                  int min_component_px = kDefaultMinComponentPx);

}  // namespace arreg
