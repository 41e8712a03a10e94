#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "arreg/mesh.hpp"

namespace arreg::glb {

inline constexpr std::uint32_t kMagic = 0x46546C67;      // "glTF"
inline constexpr std::uint32_t kVersion = 2;
inline constexpr std::uint32_t kChunkJson = 0x4E4F534A;  // "JSON"
inline constexpr std::uint32_t kChunkBin = 0x004E4942;   // "BIN\0"

struct GlbModel {
  Mesh mesh;
  std::size_t primitive_count = 0;
  /// Features present in the file that were skipped (materials, skins, ...).
  std::vector<std::string> warnings;
};

/// Parses a binary glTF 2.0 container and bakes the node hierarchy into
/// model-space positions. Only float32 VEC3 POSITION accessors are read.
///
/// Throws Error with BadMagic, UnsupportedVersion, TruncatedChunk,
/// MissingPositions or UnsupportedEncoding (Draco, sparse, external buffers).
GlbModel parse_glb(std::span<const std::uint8_t> bytes);

/// Serializes a mesh as a single-primitive GLB (positions + optional uint32
/// indices, no node transform).
std::vector<std::uint8_t> write_glb(const Mesh& mesh);

}  // namespace arreg::glb
