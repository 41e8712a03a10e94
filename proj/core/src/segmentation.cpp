#include "arreg/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "arreg/error.hpp"

namespace arreg {

SegMask::SegMask(int width, int height, std::vector<float> confidences)
    : width_(width), height_(height), conf_(std::move(confidences)) {
  if (width < 1 || height < 1) throw Error(ErrorCode::InvalidMask, "mask dimensions must be positive");
  if (conf_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(ErrorCode::InvalidMask, "mask has " + std::to_string(conf_.size()) + " values, expected " +
                                            std::to_string(static_cast<std::size_t>(width) * height));
  }
  for (float c : conf_) {
    if (!(c >= 0.0f && c <= 1.0f)) throw Error(ErrorCode::InvalidMask, "mask confidence outside [0,1]");
  }
}

SegMask SegMask::filled(int width, int height, float value) {
  return SegMask(width, height,
                 std::vector<float>(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0), value));
}

Rect mask_to_box(const SegMask& mask, double threshold, int min_component_px) {
  const int w = mask.width();
  const int h = mask.height();
  const auto conf = mask.confidences();

  std::vector<std::uint8_t> visited(conf.size(), 0);
  std::vector<int> stack;

  struct Component {
    std::size_t size = 0;
    int x0, y0, x1, y1;
  };
  bool found = false;
  Component best{};

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t seed = static_cast<std::size_t>(y) * w + x;
      if (visited[seed] || conf[seed] < threshold) continue;

      Component c{0, x, y, x, y};
      visited[seed] = 1;
      stack.push_back(static_cast<int>(seed));
      while (!stack.empty()) {
        const int idx = stack.back();
        stack.pop_back();
        const int px = idx % w;
        const int py = idx / w;
        ++c.size;
        c.x0 = std::min(c.x0, px);
        c.x1 = std::max(c.x1, px);
        c.y0 = std::min(c.y0, py);
        c.y1 = std::max(c.y1, py);
        const auto push = [&](int nx, int ny) {
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) return;
          const std::size_t n = static_cast<std::size_t>(ny) * w + nx;
          if (visited[n] || conf[n] < threshold) return;
          visited[n] = 1;
          stack.push_back(static_cast<int>(n));
        };
        push(px - 1, py);
        push(px + 1, py);
        push(px, py - 1);
        push(px, py + 1);
      }
      if (c.size < static_cast<std::size_t>(std::max(min_component_px, 0))) continue;
      // Strictly larger only: ties keep the earlier (row-major) component.
      if (!found || c.size > best.size) {
        best = c;
        found = true;
      }
    }
  }
  if (!found) throw Error(ErrorCode::NoHeadDetected, "no foreground component survives filtering");
  return {static_cast<double>(best.x0), static_cast<double>(best.y0), static_cast<double>(best.x1 - best.x0 + 1),
          static_cast<double>(best.y1 - best.y0 + 1)};
}

std::vector<std::uint32_t> encode_rle(const SegMask& mask, double threshold) {
  std::vector<std::uint32_t> runs;
  bool foreground = false;
  std::uint32_t run = 0;
  for (float c : mask.confidences()) {
    const bool fg = c >= threshold;
    if (fg != foreground) {
      runs.push_back(run);
      run = 0;
      foreground = fg;
    }
    ++run;
  }
  runs.push_back(run);
  return runs;
}

SegMask decode_rle(int width, int height, std::span<const std::uint32_t> runs) {
  if (width < 1 || height < 1) throw Error(ErrorCode::InvalidMask, "mask dimensions must be positive");
  const auto total = static_cast<std::uint64_t>(width) * static_cast<std::uint64_t>(height);
  const std::uint64_t sum = std::accumulate(runs.begin(), runs.end(), std::uint64_t{0});
  if (sum != total) {
    throw Error(ErrorCode::RleLengthMismatch,
                "runs cover " + std::to_string(sum) + " pixels, mask has " + std::to_string(total));
  }
  std::vector<float> conf;
  conf.reserve(total);
  float value = 0.0f;
  for (std::uint32_t r : runs) {
    conf.insert(conf.end(), r, value);
    value = 1.0f - value;
  }
  return SegMask(width, height, std::move(conf));
}

Rect box_from_rle(int width, int height, std::span<const std::uint32_t> runs, int min_component_px) {
  return mask_to_box(decode_rle(width, height, runs), kDefaultMaskThreshold, min_component_px);
}

}  // namespace arreg
