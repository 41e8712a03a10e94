#include "arreg/json_codec.hpp"

#include <cmath>
#include <limits>

namespace arreg {

std::string_view to_string(DofLabel dof) noexcept {
  switch (dof) {
    case DofLabel::Pitch: return "pitch";
    case DofLabel::Yaw: return "yaw";
    case DofLabel::Roll: return "roll";
    case DofLabel::Static: return "static";
  }
  return "static";
}

std::optional<DofLabel> parse_dof(std::string_view text) noexcept {
  if (text == "pitch") return DofLabel::Pitch;
  if (text == "yaw") return DofLabel::Yaw;
  if (text == "roll") return DofLabel::Roll;
  if (text == "static") return DofLabel::Static;
  return std::nullopt;
}

namespace json_codec {

namespace {

double number(const Json& obj, const char* key, const std::string& field) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) throw FieldError(field, std::string("'") + key + "' must be a number");
  return it->get<double>();
}

int integer(const Json& obj, const char* key, const std::string& field) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number_integer()) {
    throw FieldError(field, std::string("'") + key + "' must be an integer");
  }
  const auto v = it->get<std::int64_t>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw FieldError(field, std::string("'") + key + "' out of range");
  }
  return static_cast<int>(v);
}

std::string string_field(const Json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) throw FieldError(key, "must be a string");
  return it->get<std::string>();
}

MaskRle mask_from_json(const Json& value) {
  if (!value.is_object()) throw FieldError("mask_rle", "must be an object {w, h, runs}");
  MaskRle m;
  m.w = integer(value, "w", "mask_rle");
  m.h = integer(value, "h", "mask_rle");
  if (m.w < 1 || m.h < 1) throw FieldError("mask_rle", "dimensions must be positive");
  auto runs = value.find("runs");
  if (runs == value.end() || !runs->is_array()) throw FieldError("mask_rle", "'runs' must be an array");
  m.runs.reserve(runs->size());
  for (const auto& r : *runs) {
    if (!r.is_number_unsigned()) throw FieldError("mask_rle", "runs must be non-negative integers");
    m.runs.push_back(r.get<std::uint32_t>());
  }
  return m;
}

}  // namespace

Json pose_to_json(const RigidPose& pose) {
  const auto cm = pose.column_major();
  return Json(std::vector<double>(cm.begin(), cm.end()));
}

RigidPose pose_from_json(const Json& value, const char* field) {
  if (!value.is_array() || value.size() != 16) throw FieldError(field, "must be an array of 16 numbers");
  std::array<double, 16> cm{};
  for (std::size_t i = 0; i < 16; ++i) {
    if (!value[i].is_number()) throw FieldError(field, "must be an array of 16 numbers");
    cm[i] = value[i].get<double>();
  }
  return RigidPose::from_column_major(cm);
}

Json rect_to_json(const Rect& r) { return {{"x", r.x}, {"y", r.y}, {"w", r.w}, {"h", r.h}}; }

Rect rect_from_json(const Json& value, const char* field) {
  if (!value.is_object()) throw FieldError(field, "must be an object {x, y, w, h}");
  Rect r{number(value, "x", field), number(value, "y", field), number(value, "w", field), number(value, "h", field)};
  if (!(std::isfinite(r.x) && std::isfinite(r.y) && r.w >= 0.0 && r.h >= 0.0 && std::isfinite(r.w) &&
        std::isfinite(r.h))) {
    throw FieldError(field, "must be finite with non-negative size");
  }
  return r;
}

Json pixel_to_json(const PixelPoint& p) { return {{"u", p.u}, {"v", p.v}}; }

Json header_to_json(const SessionHeader& h) {
  return {{"format_version", h.format_version}, {"image_w", h.image_w}, {"image_h", h.image_h},
          {"fov_v_deg", h.fov_v_deg},           {"model_ref", h.model_ref}, {"notes", h.notes}};
}

SessionHeader header_from_json(const Json& value) {
  if (!value.is_object()) throw FieldError("header", "must be a JSON object");
  SessionHeader h;
  h.format_version = integer(value, "format_version", "format_version");
  h.image_w = integer(value, "image_w", "image_w");
  h.image_h = integer(value, "image_h", "image_h");
  h.fov_v_deg = number(value, "fov_v_deg", "fov_v_deg");
  h.model_ref = string_field(value, "model_ref");
  if (auto it = value.find("notes"); it != value.end()) {
    if (!it->is_string()) throw FieldError("notes", "must be a string");
    h.notes = it->get<std::string>();
  }
  if (h.image_w < 1 || h.image_h < 1) throw FieldError("image_w", "image dimensions must be >= 1");
  if (!(h.fov_v_deg > 0.0 && h.fov_v_deg < 180.0)) throw FieldError("fov_v_deg", "must lie in (0, 180)");
  return h;
}

Json frame_to_json(const SessionFrame& f) {
  Json j = {{"seq", f.seq}, {"t_ms", f.t_ms}};
  if (f.pose) j["pose"] = pose_to_json(*f.pose);
  if (f.box) j["box"] = rect_to_json(*f.box);
  if (f.mask_rle) {
    j["mask_rle"] = {{"w", f.mask_rle->w}, {"h", f.mask_rle->h}, {"runs", f.mask_rle->runs}};
  }
  j["dof_label"] = std::string(to_string(f.dof_label));
  if (std::isnan(f.angle_deg)) {
    j["angle_deg"] = nullptr;
  } else {
    j["angle_deg"] = f.angle_deg;
  }
  return j;
}

SessionFrame frame_from_json(const Json& value) {
  if (!value.is_object()) throw FieldError("frame", "must be a JSON object");
  SessionFrame f;
  auto seq = value.find("seq");
  if (seq == value.end() || !seq->is_number_integer()) throw FieldError("seq", "must be an integer");
  f.seq = seq->get<std::int64_t>();
  if (auto t = value.find("t_ms"); t != value.end()) {
    if (!t->is_number()) throw FieldError("t_ms", "must be a number");
    f.t_ms = t->get<double>();
  }
  auto pose = value.find("pose");
  if (pose == value.end()) throw FieldError("pose", "missing");
  f.pose = pose_from_json(*pose);
  if (auto b = value.find("box"); b != value.end() && !b->is_null()) f.box = rect_from_json(*b);
  if (auto m = value.find("mask_rle"); m != value.end() && !m->is_null()) f.mask_rle = mask_from_json(*m);
  if (f.box && f.mask_rle) throw FieldError("box", "a frame carries either box or mask_rle, not both");
  if (auto d = value.find("dof_label"); d != value.end()) {
    const auto dof = d->is_string() ? parse_dof(d->get<std::string>()) : std::nullopt;
    if (!dof) throw FieldError("dof_label", "must be one of pitch, yaw, roll, static");
    f.dof_label = *dof;
  }
  if (auto a = value.find("angle_deg"); a != value.end() && !a->is_null()) {
    if (!a->is_number()) throw FieldError("angle_deg", "must be a number or null");
    f.angle_deg = a->get<double>();
  }
  return f;
}

}  // namespace json_codec
}  // namespace arreg
