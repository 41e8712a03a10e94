#include "arreg/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "arreg/error.hpp"
#include "arreg/glb.hpp"

namespace arreg {

namespace {

constexpr std::string_view kCubeRef = "builtin:cube";
constexpr std::string_view kHeadRef = "builtin:head-ellipsoid";

std::vector<double> parse_csv_doubles(std::string_view text) {
  std::vector<double> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto token = text.substr(0, comma);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
      throw Error(ErrorCode::ModelLoad, "bad number '" + std::string(token) + "' in model reference");
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace

Box3 mesh_aabb(const Mesh& m) {
  if (m.empty()) throw Error(ErrorCode::EmptyMesh, "mesh has no positions");
  Box3 box{m.positions.front(), m.positions.front()};
  for (const Point3& p : m.positions) {
    box.min = {std::min(box.min.x, p.x), std::min(box.min.y, p.y), std::min(box.min.z, p.z)};
    box.max = {std::max(box.max.x, p.x), std::max(box.max.y, p.y), std::max(box.max.z, p.z)};
  }
  return box;
}

Rect project_mesh_bbox(const CameraIntrinsics& k, const RigidPose& model_pose, const ScaleFactors& s,
                       const PixelPoint& anchor, const Mesh& m) {
  if (m.empty()) throw Error(ErrorCode::EmptyMesh, "cannot project an empty mesh");
  double u_min = std::numeric_limits<double>::infinity();
  double v_min = u_min;
  double u_max = -u_min;
  double v_max = -u_min;
  for (const Point3& local : m.positions) {
    const PixelPoint p = project_scaled_about(k, s, anchor, normalize(model_pose.apply(local)));
    u_min = std::min(u_min, p.u);
    u_max = std::max(u_max, p.u);
    v_min = std::min(v_min, p.v);
    v_max = std::max(v_max, p.v);
  }
  return {u_min, v_min, u_max - u_min, v_max - v_min};
}

Mesh make_cube_mesh() {
  Mesh m;
  for (int i = 0; i < 8; ++i) {
    m.positions.push_back({(i & 1) ? 0.5 : -0.5, (i & 2) ? 0.5 : -0.5, (i & 4) ? 0.5 : -0.5});
  }
  // Two triangles per face, corners indexed by the bit pattern above.
  m.indices = {{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6}, {0, 1, 4}, {1, 5, 4},
               {2, 6, 3}, {3, 6, 7}, {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5}};
  return m;
}

Mesh make_ellipsoid_mesh(double a, double b, double c, int segments, int rings) {
  if (!(a > 0 && b > 0 && c > 0) || segments < 3 || rings < 2) {
    throw Error(ErrorCode::DomainError, "ellipsoid needs positive semi-axes, >=3 segments and >=2 rings");
  }
  Mesh m;
  // Poles on the y axis (head top/chin), rings of latitude between them.
  m.positions.push_back({0.0, -b, 0.0});
  for (int r = 1; r < rings; ++r) {
    const double theta = std::numbers::pi * r / rings;
    const double y = -std::cos(theta);
    const double ring = std::sin(theta);
    for (int s = 0; s < segments; ++s) {
      const double phi = 2.0 * std::numbers::pi * s / segments;
      m.positions.push_back({a * ring * std::cos(phi), b * y, c * ring * std::sin(phi)});
    }
  }
  m.positions.push_back({0.0, b, 0.0});

  const auto ring_index = [segments](int r, int s) {
    return static_cast<std::uint32_t>(1 + (r - 1) * segments + (s % segments));
  };
  const auto last = static_cast<std::uint32_t>(m.positions.size() - 1);
  for (int s = 0; s < segments; ++s) {
    m.indices.push_back({0, ring_index(1, s + 1), ring_index(1, s)});
    m.indices.push_back({last, ring_index(rings - 1, s), ring_index(rings - 1, s + 1)});
  }
  for (int r = 1; r + 1 < rings; ++r) {
    for (int s = 0; s < segments; ++s) {
      m.indices.push_back({ring_index(r, s), ring_index(r, s + 1), ring_index(r + 1, s)});
      m.indices.push_back({ring_index(r, s + 1), ring_index(r + 1, s + 1), ring_index(r + 1, s)});
    }
  }
  return m;
}

std::string head_ellipsoid_ref(double a, double b, double c) {
  if (a == kDefaultHeadAxes[0] && b == kDefaultHeadAxes[1] && c == kDefaultHeadAxes[2]) {
    return std::string(kHeadRef);
  }
  return fmt::format("{}:{},{},{}", kHeadRef, a, b, c);
}

Mesh load_model(const std::string& model_ref, const std::filesystem::path& base_dir) {
  if (model_ref == kCubeRef) return make_cube_mesh();
  if (model_ref == kHeadRef) {
    return make_ellipsoid_mesh(kDefaultHeadAxes[0], kDefaultHeadAxes[1], kDefaultHeadAxes[2]);
  }
  if (model_ref.starts_with(std::string(kHeadRef) + ":")) {
    const auto axes = parse_csv_doubles(std::string_view(model_ref).substr(kHeadRef.size() + 1));
    if (axes.size() != 3 || !(axes[0] > 0 && axes[1] > 0 && axes[2] > 0)) {
      throw Error(ErrorCode::ModelLoad, "head ellipsoid needs three positive semi-axes: " + model_ref);
    }
    return make_ellipsoid_mesh(axes[0], axes[1], axes[2]);
  }
  if (model_ref.starts_with("builtin:")) throw Error(ErrorCode::ModelLoad, "unknown builtin model " + model_ref);

  std::filesystem::path path(model_ref);
  if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ModelLoad, "cannot open model file " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return glb::parse_glb(bytes).mesh;
}

}  // namespace arreg
