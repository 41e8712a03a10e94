#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "arreg/geometry.hpp"

namespace arreg {

/// Axis-aligned pixel rectangle, top-left origin. Zero-area rects are
/// representable; degenerate() flags them.
struct Rect {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double right() const noexcept { return x + w; }
  double bottom() const noexcept { return y + h; }
  double area() const noexcept { return w * h; }
  bool degenerate() const noexcept { return !(w > 0.0 && h > 0.0); }

  friend bool operator==(const Rect&, const Rect&) = default;
};

struct Box3 {
  Point3 min;
  Point3 max;

  Point3 extent() const noexcept { return {max.x - min.x, max.y - min.y, max.z - min.z}; }

  friend bool operator==(const Box3&, const Box3&) = default;
};

struct Mesh {
  std::vector<Point3> positions;
  std::vector<std::array<std::uint32_t, 3>> indices;
  bool node_transform_applied = false;

  bool empty() const noexcept { return positions.empty(); }
};

/// Throws Error{EmptyMesh} on an empty mesh.
Box3 mesh_aabb(const Mesh& m);

/// Tight pixel bounds of every vertex after `model_pose`, normalization and
/// anchor-centered scaling. Not clipped to the image.
/// Throws Error{EmptyMesh} or Error{BehindCamera}.
Rect project_mesh_bbox(const CameraIntrinsics& k, const RigidPose& model_pose,
                       const ScaleFactors& s, const PixelPoint& anchor, const Mesh& m);

/// Unit cube centered at the origin: 8 corners at +-0.5, 12 triangles.
Mesh make_cube_mesh();

/// UV sphere with `segments` longitudes and `rings` latitude bands, scaled by
/// the semi-axes. The default 32x16 tessellation is what the synthetic
/// sessions and the built-in head model use.
Mesh make_ellipsoid_mesh(double a, double b, double c, int segments = 32, int rings = 16);

/// Default semi-axes of the synthetic head (x: half-width, y: half-height,
/// z: half-depth), in world units.
inline constexpr std::array<double, 3> kDefaultHeadAxes{0.09, 0.12, 0.10};

/// Resolves a model reference:
///   builtin:cube
///   builtin:head-ellipsoid            (default semi-axes)
///   builtin:head-ellipsoid:A,B,C      (explicit semi-axes)
///   anything else                     path to a .glb (relative to `base_dir`)
/// Throws Error{ModelLoad} for unknown builtins or unreadable files; GLB
/// parse errors propagate with their own codes.
Mesh load_model(const std::string& model_ref, const std::filesystem::path& base_dir = {});

/// Formats the ellipsoid reference understood by load_model().
std::string head_ellipsoid_ref(double a, double b, double c);

}  // namespace arreg
