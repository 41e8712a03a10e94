#include "arreg/glb.hpp"

#include <cstring>
#include <functional>
#include <optional>
#include <set>
#include <string>

#include <Eigen/Geometry>
#include <nlohmann/json.hpp>

#include "arreg/error.hpp"

namespace arreg::glb {

namespace {

using nlohmann::json;
using Affine = Eigen::Matrix4d;

constexpr int kFloat = 5126;
constexpr int kUnsignedByte = 5121;
constexpr int kUnsignedShort = 5123;
constexpr int kUnsignedInt = 5125;
constexpr int kModeTriangles = 4;

// GLB is little-endian; so is every platform this builds on.
std::uint32_t read_u32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  std::uint32_t v = 0;
  std::memcpy(&v, bytes.data() + offset, sizeof v);
  return v;
}

void append_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
  out.insert(out.end(), p, p + sizeof v);
}

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw Error(code, "glb: " + msg); }

struct Chunks {
  std::string json_text;
  std::span<const std::uint8_t> bin;
  bool has_bin = false;
};

Chunks split_chunks(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || read_u32(bytes, 0) != kMagic) fail(ErrorCode::BadMagic, "missing 'glTF' magic");
  if (bytes.size() < 12) fail(ErrorCode::TruncatedChunk, "header shorter than 12 bytes");
  const std::uint32_t version = read_u32(bytes, 4);
  if (version != kVersion) {
    fail(ErrorCode::UnsupportedVersion, "container version " + std::to_string(version) + " (expected 2)");
  }
  const std::uint32_t total = read_u32(bytes, 8);
  if (total > bytes.size()) {
    fail(ErrorCode::TruncatedChunk, "header declares " + std::to_string(total) + " bytes, have " +
                                        std::to_string(bytes.size()));
  }
  const auto body = bytes.first(total);

  Chunks out;
  std::size_t offset = 12;
  int index = 0;
  while (offset < body.size()) {
    if (body.size() - offset < 8) fail(ErrorCode::TruncatedChunk, "incomplete chunk header");
    const std::uint32_t length = read_u32(body, offset);
    const std::uint32_t type = read_u32(body, offset + 4);
    offset += 8;
    if (length > body.size() - offset) {
      fail(ErrorCode::TruncatedChunk, "chunk " + std::to_string(index) + " overruns the container");
    }
    const auto payload = body.subspan(offset, length);
    if (index == 0) {
      if (type != kChunkJson) fail(ErrorCode::TruncatedChunk, "first chunk is not JSON");
      out.json_text.assign(reinterpret_cast<const char*>(payload.data()), payload.size());
    } else if (index == 1 && type == kChunkBin) {
      out.bin = payload;
      out.has_bin = true;
    }
    // Further chunks are reserved by the format and skipped.
    offset += length;
    ++index;
  }
  if (index == 0) fail(ErrorCode::TruncatedChunk, "no JSON chunk");
  return out;
}

Affine local_transform(const json& node) {
  Affine m = Affine::Identity();
  if (auto it = node.find("matrix"); it != node.end()) {
    if (!it->is_array() || it->size() != 16) fail(ErrorCode::UnsupportedEncoding, "node matrix must have 16 numbers");
    for (int c = 0; c < 4; ++c) {
      for (int r = 0; r < 4; ++r) m(r, c) = (*it)[c * 4 + r].get<double>();
    }
    return m;
  }
  Eigen::Vector3d t = Eigen::Vector3d::Zero();
  Eigen::Vector3d s = Eigen::Vector3d::Ones();
  Eigen::Quaterniond q = Eigen::Quaterniond::Identity();
  if (auto it = node.find("translation"); it != node.end()) {
    t = {(*it)[0].get<double>(), (*it)[1].get<double>(), (*it)[2].get<double>()};
  }
  if (auto it = node.find("rotation"); it != node.end()) {
    // glTF order is (x, y, z, w).
    q = Eigen::Quaterniond((*it)[3].get<double>(), (*it)[0].get<double>(), (*it)[1].get<double>(),
                           (*it)[2].get<double>());
    q.normalize();
  }
  if (auto it = node.find("scale"); it != node.end()) {
    s = {(*it)[0].get<double>(), (*it)[1].get<double>(), (*it)[2].get<double>()};
  }
  m.topLeftCorner<3, 3>() = q.toRotationMatrix() * s.asDiagonal();
  m.topRightCorner<3, 1>() = t;
  return m;
}

class Reader {
 public:
  Reader(const json& doc, const Chunks& chunks) : doc_(doc), chunks_(chunks) {}

  GlbModel read() {
    for (const char* key : {"materials", "textures", "images", "skins", "animations", "cameras"}) {
      if (auto it = doc_.find(key); it != doc_.end() && it->is_array() && !it->empty()) {
        model_.warnings.push_back(std::string("ignored ") + key);
      }
    }
    const json& nodes = array_or_empty("nodes");
    if (nodes.empty()) {
      const json& meshes = array_or_empty("meshes");
      for (std::size_t i = 0; i < meshes.size(); ++i) add_mesh(i, Affine::Identity());
    } else {
      for (std::size_t root : root_nodes()) visit(root, Affine::Identity(), 0);
    }
    if (model_.mesh.positions.empty()) fail(ErrorCode::MissingPositions, "no POSITION data in any primitive");
    return std::move(model_);
  }

 private:
  const json& array_or_empty(const char* key) const {
    static const json kEmpty = json::array();
    auto it = doc_.find(key);
    return (it != doc_.end() && it->is_array()) ? *it : kEmpty;
  }

  const json& element(const char* key, std::size_t index) const {
    const json& arr = array_or_empty(key);
    if (index >= arr.size()) {
      fail(ErrorCode::MissingPositions, std::string(key) + "[" + std::to_string(index) + "] does not exist");
    }
    return arr[index];
  }

  std::vector<std::size_t> root_nodes() const {
    const json& scenes = array_or_empty("scenes");
    if (!scenes.empty()) {
      const std::size_t scene = doc_.value("scene", std::size_t{0});
      const json& sc = element("scenes", scene);
      return sc.value("nodes", std::vector<std::size_t>{});
    }
    const json& nodes = array_or_empty("nodes");
    std::set<std::size_t> children;
    for (const auto& n : nodes) {
      for (std::size_t c : n.value("children", std::vector<std::size_t>{})) children.insert(c);
    }
    std::vector<std::size_t> roots;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (!children.contains(i)) roots.push_back(i);
    }
    return roots;
  }

  void visit(std::size_t index, const Affine& parent, int depth) {
    if (depth > 64) fail(ErrorCode::UnsupportedEncoding, "node hierarchy too deep or cyclic");
    const json& node = element("nodes", index);
    const Affine world = parent * local_transform(node);
    if (auto it = node.find("mesh"); it != node.end()) add_mesh(it->get<std::size_t>(), world);
    for (std::size_t c : node.value("children", std::vector<std::size_t>{})) visit(c, world, depth + 1);
  }

  struct View {
    std::span<const std::uint8_t> data;
    std::size_t stride = 0;
    std::size_t count = 0;
  };

  View accessor_view(const json& accessor, std::size_t element_size) const {
    if (accessor.contains("sparse")) fail(ErrorCode::UnsupportedEncoding, "sparse accessors are not supported");
    if (!accessor.contains("bufferView")) fail(ErrorCode::UnsupportedEncoding, "accessor without bufferView");
    const json& bv = element("bufferViews", accessor["bufferView"].get<std::size_t>());
    const std::size_t buffer = bv.value("buffer", std::size_t{0});
    const json& buf = element("buffers", buffer);
    if (buffer != 0 || buf.contains("uri")) fail(ErrorCode::UnsupportedEncoding, "external buffers are not supported");
    if (!chunks_.has_bin) fail(ErrorCode::TruncatedChunk, "accessor references a missing BIN chunk");

    const std::size_t view_offset = bv.value("byteOffset", std::size_t{0});
    const std::size_t view_length = bv.at("byteLength").get<std::size_t>();
    if (view_offset > chunks_.bin.size() || view_length > chunks_.bin.size() - view_offset) {
      fail(ErrorCode::TruncatedChunk, "bufferView exceeds the BIN chunk");
    }
    View v;
    v.data = chunks_.bin.subspan(view_offset, view_length);
    v.stride = bv.value("byteStride", element_size);
    v.count = accessor.at("count").get<std::size_t>();
    const std::size_t acc_offset = accessor.value("byteOffset", std::size_t{0});
    if (v.count > 0) {
      const std::size_t needed = acc_offset + (v.count - 1) * v.stride + element_size;
      if (v.stride < element_size || needed > v.data.size()) {
        fail(ErrorCode::TruncatedChunk, "accessor exceeds its bufferView");
      }
    }
    v.data = v.data.subspan(acc_offset);
    return v;
  }

  void add_mesh(std::size_t mesh_index, const Affine& world) {
    const json& mesh = element("meshes", mesh_index);
    if (!world.isIdentity(0.0)) model_.mesh.node_transform_applied = true;
    for (const json& prim : mesh.value("primitives", json::array())) {
      if (auto ext = prim.find("extensions"); ext != prim.end() && ext->contains("KHR_draco_mesh_compression")) {
        fail(ErrorCode::UnsupportedEncoding, "Draco-compressed primitives are not supported");
      }
      const json& attrs = prim.value("attributes", json::object());
      if (!attrs.contains("POSITION")) continue;
      ++model_.primitive_count;

      const json& acc = element("accessors", attrs["POSITION"].get<std::size_t>());
      if (acc.value("componentType", 0) != kFloat || acc.value("type", std::string{}) != "VEC3") {
        fail(ErrorCode::UnsupportedEncoding, "POSITION must be float32 VEC3");
      }
      const View v = accessor_view(acc, 12);
      const auto base = static_cast<std::uint32_t>(model_.mesh.positions.size());
      for (std::size_t i = 0; i < v.count; ++i) {
        float xyz[3];
        std::memcpy(xyz, v.data.data() + i * v.stride, sizeof xyz);
        const Eigen::Vector4d p = world * Eigen::Vector4d(xyz[0], xyz[1], xyz[2], 1.0);
        model_.mesh.positions.push_back({p.x(), p.y(), p.z()});
      }
      read_indices(prim, base, static_cast<std::uint32_t>(v.count));
    }
  }

  void read_indices(const json& prim, std::uint32_t base, std::uint32_t vertex_count) {
    const int mode = prim.value("mode", kModeTriangles);
    if (mode != kModeTriangles) {
      model_.warnings.push_back("primitive mode " + std::to_string(mode) + " is not triangles; indices ignored");
      return;
    }
    auto& tris = model_.mesh.indices;
    if (!prim.contains("indices")) {
      for (std::uint32_t i = 0; i + 2 < vertex_count; i += 3) tris.push_back({base + i, base + i + 1, base + i + 2});
      return;
    }
    const json& acc = element("accessors", prim["indices"].get<std::size_t>());
    const int type = acc.value("componentType", 0);
    std::size_t size = 0;
    switch (type) {
      case kUnsignedByte: size = 1; break;
      case kUnsignedShort: size = 2; break;
      case kUnsignedInt: size = 4; break;
      default: fail(ErrorCode::UnsupportedEncoding, "index componentType " + std::to_string(type));
    }
    const View v = accessor_view(acc, size);
    std::vector<std::uint32_t> idx(v.count);
    for (std::size_t i = 0; i < v.count; ++i) {
      const std::uint8_t* p = v.data.data() + i * v.stride;
      if (size == 1) {
        idx[i] = *p;
      } else if (size == 2) {
        std::uint16_t s;
        std::memcpy(&s, p, 2);
        idx[i] = s;
      } else {
        std::memcpy(&idx[i], p, 4);
      }
      if (idx[i] >= vertex_count) {
        model_.warnings.push_back("index out of range; primitive indices dropped");
        return;
      }
    }
    for (std::size_t i = 0; i + 2 < idx.size(); i += 3) {
      tris.push_back({base + idx[i], base + idx[i + 1], base + idx[i + 2]});
    }
  }

  const json& doc_;
  const Chunks& chunks_;
  GlbModel model_;
};

}  // namespace

GlbModel parse_glb(std::span<const std::uint8_t> bytes) {
  const Chunks chunks = split_chunks(bytes);
  json doc;
  try {
    doc = json::parse(chunks.json_text);
  } catch (const json::exception& e) {
    fail(ErrorCode::UnsupportedEncoding, std::string("invalid JSON chunk: ") + e.what());
  }
  if (!doc.is_object()) fail(ErrorCode::UnsupportedEncoding, "JSON chunk is not an object");
  try {
    return Reader(doc, chunks).read();
  } catch (const json::exception& e) {
    fail(ErrorCode::UnsupportedEncoding, std::string("malformed glTF JSON: ") + e.what());
  }
}

std::vector<std::uint8_t> write_glb(const Mesh& mesh) {
  std::vector<std::uint8_t> bin;
  const auto push_bytes = [&bin](const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    bin.insert(bin.end(), b, b + n);
  };

  std::array<float, 3> lo{}, hi{};
  for (std::size_t i = 0; i < mesh.positions.size(); ++i) {
    const Point3& p = mesh.positions[i];
    const std::array<float, 3> f{static_cast<float>(p.x), static_cast<float>(p.y), static_cast<float>(p.z)};
    push_bytes(f.data(), sizeof f);
    for (int a = 0; a < 3; ++a) {
      lo[a] = i == 0 ? f[a] : std::min(lo[a], f[a]);
      hi[a] = i == 0 ? f[a] : std::max(hi[a], f[a]);
    }
  }
  const std::size_t positions_len = bin.size();
  for (const auto& tri : mesh.indices) push_bytes(tri.data(), sizeof tri);
  const std::size_t indices_len = bin.size() - positions_len;

  json primitive = {{"attributes", {{"POSITION", 0}}}, {"mode", kModeTriangles}};
  json views = json::array({{{"buffer", 0}, {"byteOffset", 0}, {"byteLength", positions_len}, {"target", 34962}}});
  json accessors = json::array({{{"bufferView", 0},
                                 {"componentType", kFloat},
                                 {"count", mesh.positions.size()},
                                 {"type", "VEC3"},
                                 {"min", lo},
                                 {"max", hi}}});
  if (indices_len > 0) {
    views.push_back({{"buffer", 0}, {"byteOffset", positions_len}, {"byteLength", indices_len}, {"target", 34963}});
    accessors.push_back(
        {{"bufferView", 1}, {"componentType", kUnsignedInt}, {"count", mesh.indices.size() * 3}, {"type", "SCALAR"}});
    primitive["indices"] = 1;
  }
  while (bin.size() % 4 != 0) bin.push_back(0);

  const json doc = {{"asset", {{"version", "2.0"}, {"generator", "arreg"}}},
                    {"scene", 0},
                    {"scenes", json::array({{{"nodes", {0}}}})},
                    {"nodes", json::array({{{"mesh", 0}}})},
                    {"meshes", json::array({{{"primitives", json::array({primitive})}}})},
                    {"buffers", json::array({{{"byteLength", bin.size()}}})},
                    {"bufferViews", views},
                    {"accessors", accessors}};
  std::string text = doc.dump();
  while (text.size() % 4 != 0) text.push_back(' ');

  std::vector<std::uint8_t> out;
  out.reserve(12 + 8 + text.size() + 8 + bin.size());
  append_u32(out, kMagic);
  append_u32(out, kVersion);
  append_u32(out, static_cast<std::uint32_t>(12 + 8 + text.size() + 8 + bin.size()));
  append_u32(out, static_cast<std::uint32_t>(text.size()));
  append_u32(out, kChunkJson);
  out.insert(out.end(), text.begin(), text.end());
  append_u32(out, static_cast<std::uint32_t>(bin.size()));
  append_u32(out, kChunkBin);
  out.insert(out.end(), bin.begin(), bin.end());
  return out;
}

}  // namespace arreg::glb
