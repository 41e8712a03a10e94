#include "arreg/protocol.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <stdexcept>

#include <boost/archive/iterators/base64_from_binary.hpp>
#include <boost/archive/iterators/binary_from_base64.hpp>
#include <boost/archive/iterators/transform_width.hpp>

#include "arreg/error.hpp"
#include "arreg/evaluation.hpp"
#include "arreg/glb.hpp"
#include "arreg/json_codec.hpp"
#include "arreg/session_io.hpp"

namespace arreg::protocol {

namespace {

using json_codec::Json;

std::optional<WireError> wire_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonRigidPose:
    case ErrorCode::BehindCamera:
    case ErrorCode::Singular:
      return WireError::BadPose;
    default:
      return std::nullopt;
  }
}

bool path_safe_name(const std::string& name) {
  static const std::regex kPattern("[A-Za-z0-9_-]{1,64}");
  return std::regex_match(name, kPattern);
}

template <typename T>
std::optional<T> optional_field(const Json& msg, const char* key) {
  auto it = msg.find(key);
  if (it == msg.end() || it->is_null()) return std::nullopt;
  if constexpr (std::is_same_v<T, bool>) {
    if (!it->is_boolean()) throw json_codec::FieldError(key, "must be a boolean");
  } else {
    if (!it->is_number()) throw json_codec::FieldError(key, "must be a number");
  }
  return it->get<T>();
}

}  // namespace

std::string_view to_string(WireError code) noexcept {
  switch (code) {
    case WireError::NoHello: return "NO_HELLO";
    case WireError::UnsupportedVersion: return "UNSUPPORTED_VERSION";
    case WireError::Parse: return "PARSE";
    case WireError::BadPose: return "BAD_POSE";
    case WireError::ModelLoad: return "MODEL_LOAD";
    case WireError::Internal: return "INTERNAL";
  }
  return "INTERNAL";
}

std::string error_message(WireError code, std::string_view msg, bool fatal) {
  const Json j = {{"type", "err"}, {"code", std::string(to_string(code))}, {"msg", std::string(msg)}, {"fatal", fatal}};
  return j.dump();
}

ModelLibrary::ModelLibrary(std::filesystem::path asset_dir) : asset_dir_(std::move(asset_dir)) {}

std::shared_ptr<const Mesh> ModelLibrary::get(const std::string& model_ref) {
  std::string key = model_ref;
  if (!model_ref.starts_with("builtin:")) {
    namespace fs = std::filesystem;
    const fs::path root = fs::weakly_canonical(asset_dir_.empty() ? fs::current_path() : asset_dir_);
    const fs::path target = fs::weakly_canonical(root / model_ref);
    const auto [root_end, unused] = std::mismatch(root.begin(), root.end(), target.begin(), target.end());
    if (root_end != root.end()) throw Error(ErrorCode::ModelLoad, "model path escapes the asset directory");
    key = target.string();
  }
  {
    std::lock_guard lock(mu_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  auto mesh = std::make_shared<const Mesh>(load_model(key));
  std::lock_guard lock(mu_);
  return cache_.try_emplace(key, std::move(mesh)).first->second;
}

struct SessionHandler::Recording {
  std::ofstream file;
  std::optional<SessionWriter> writer;
};

SessionHandler::SessionHandler(ServiceContext ctx, std::string session_id)
    : ctx_(std::move(ctx)), session_id_(std::move(session_id)) {}

SessionHandler::~SessionHandler() = default;

std::vector<std::string> SessionHandler::handle(std::string_view message) {
  std::vector<std::string> out;
  if (closed_) return out;

  Json msg;
  try {
    msg = Json::parse(message);
  } catch (const Json::exception& e) {
    out.push_back(error_message(WireError::Parse, std::string("invalid JSON: ") + e.what(), false));
    return out;
  }
  const auto type_it = msg.is_object() ? msg.find("type") : msg.end();
  if (!msg.is_object() || type_it == msg.end() || !type_it->is_string()) {
    out.push_back(error_message(WireError::Parse, "message must be an object with a string 'type'", false));
    return out;
  }
  const std::string type = type_it->get<std::string>();
  if (!hello_done_ && type != "hello") {
    fatal(WireError::NoHello, "first message must be hello, got '" + type + "'", out);
    return out;
  }

  try {
    if (type == "hello") {
      on_hello(msg, out);
    } else if (type == "frame") {
      on_frame(msg, out);
    } else if (type == "set") {
      on_set(msg, out);
    } else if (type == "record_start") {
      on_record_start(msg, out);
    } else if (type == "record_stop") {
      on_record_stop(out);
    } else {
      out.push_back(error_message(WireError::Parse, "unknown message type '" + type + "'", false));
    }
  } catch (const json_codec::FieldError& e) {
    out.push_back(error_message(WireError::Parse, e.what(), false));
  } catch (const std::exception& e) {
    out.push_back(error_message(WireError::Internal, e.what(), false));
  }
  return out;
}

void SessionHandler::fatal(WireError code, std::string_view msg, std::vector<std::string>& out) {
  out.push_back(error_message(code, msg, true));
  closed_ = true;
  recording_.reset();
}

void SessionHandler::on_hello(const Json& msg, std::vector<std::string>& out) {
  int version = kProtocolVersion;
  if (auto it = msg.find("protocol_version"); it != msg.end()) {
    if (!it->is_number_integer()) throw json_codec::FieldError("protocol_version", "must be an integer");
    version = it->get<int>();
  }
  if (version != kProtocolVersion) {
    fatal(WireError::UnsupportedVersion,
          "protocol_version " + std::to_string(version) + " not supported (server speaks " +
              std::to_string(kProtocolVersion) + ")",
          out);
    return;
  }

  SessionHeader header;
  const auto dim = [&msg](const char* key) {
    auto it = msg.find(key);
    if (it == msg.end() || !it->is_number_integer() || it->get<std::int64_t>() < 1 ||
        it->get<std::int64_t>() > 1 << 16) {
      throw json_codec::FieldError(key, "must be a positive integer");
    }
    return it->get<int>();
  };
  header.image_w = dim("image_w");
  header.image_h = dim("image_h");
  header.fov_v_deg = optional_field<double>(msg, "fov_v_deg").value_or(kDefaultFovDeg);
  if (!(header.fov_v_deg > 0.0 && header.fov_v_deg < 180.0)) {
    throw json_codec::FieldError("fov_v_deg", "must lie in (0, 180)");
  }
  const CameraIntrinsics k = intrinsics_from_fov(header.fov_v_deg, header.image_w, header.image_h);

  std::shared_ptr<const Mesh> model;
  std::vector<std::uint8_t> uploaded;
  try {
    if (auto glb = msg.find("model_glb_b64"); glb != msg.end()) {
      if (!glb->is_string()) throw Error(ErrorCode::ModelLoad, "model_glb_b64 must be a string");
      const auto& text = glb->get_ref<const std::string&>();
      if (text.size() / 4 * 3 > kMaxGlbBytes + 3) throw Error(ErrorCode::ModelLoad, "GLB upload exceeds 32 MiB");
      try {
        uploaded = base64_decode(text);
      } catch (const std::invalid_argument& e) {
        throw Error(ErrorCode::ModelLoad, e.what());
      }
      if (uploaded.size() > kMaxGlbBytes) throw Error(ErrorCode::ModelLoad, "GLB upload exceeds 32 MiB");
      model = std::make_shared<const Mesh>(glb::parse_glb(uploaded).mesh);
      header.model_ref = "upload.glb";
    } else {
      auto ref = msg.find("model_ref");
      header.model_ref = (ref != msg.end() && ref->is_string()) ? ref->get<std::string>() : "builtin:head-ellipsoid";
      model = ctx_.models->get(header.model_ref);
    }
  } catch (const Error& e) {
    fatal(WireError::ModelLoad, std::string(to_string(e.code())) + ": " + e.what(), out);
    return;
  }

  if (hello_done_) {
    // Re-hello (camera switch, new model): keep the user's controls.
    state_.model = std::move(model);
    state_.scale = ScaleFactors::unit();
    state_.last_pose.reset();
  } else {
    state_ = RegistrationState::with_model(std::move(model));
  }
  intrinsics_ = k;
  header_ = header;
  uploaded_glb_ = std::move(uploaded);
  hello_done_ = true;
  out.push_back(Json{{"type", "ready"}, {"session_id", session_id_}, {"protocol_version", kProtocolVersion}}.dump());
}

void SessionHandler::on_frame(const Json& msg, std::vector<std::string>& out) {
  SessionFrame frame;
  try {
    frame = json_codec::frame_from_json(msg);
  } catch (const json_codec::FieldError& e) {
    out.push_back(error_message(e.field() == "pose" ? WireError::BadPose : WireError::Parse, e.what(), false));
    return;
  }

  FrameResult r;
  try {
    r = step(state_, frame, intrinsics_);
  } catch (const Error& e) {
    const WireError code = wire_code_for(e.code()).value_or(WireError::Internal);
    out.push_back(error_message(code, std::string(to_string(e.code())) + ": " + e.what(), false));
    return;
  }

  Json state = {{"type", "state"},
                {"seq", r.seq},
                {"model_matrix", json_codec::pose_to_json(r.model_matrix)},
                {"s_w", r.scale.s_w},
                {"s_h", r.scale.s_h},
                {"anchor", json_codec::pixel_to_json(r.anchor)},
                {"box_m", json_codec::rect_to_json(r.box_m)}};
  if (r.box_i && !r.box_i->degenerate()) {
    const DimensionErrors e = dimension_errors(*r.box_i, r.box_m);
    state["metrics"] = {{"e_w_pct", e.e_w_pct}, {"e_h_pct", e.e_h_pct}, {"iou", iou(*r.box_i, r.box_m)}};
  }
  state["visible"] = r.visible;
  state["opacity"] = r.opacity;
  out.push_back(state.dump());

  if (recording_) {
    try {
      recording_->writer->write(frame);
      recording_->file.flush();
    } catch (const Error& e) {
      out.push_back(error_message(WireError::Internal, std::string("recording: ") + e.what(), false));
    }
  }
}

void SessionHandler::on_set(const Json& msg, std::vector<std::string>& out) {
  ManualParams p;
  if (auto it = msg.find("manual_scale"); it != msg.end() && !it->is_null()) {
    if (!it->is_array() || it->size() != 3 || !std::all_of(it->begin(), it->end(), [](const Json& v) {
          return v.is_number();
        })) {
      throw json_codec::FieldError("manual_scale", "must be an array of 3 numbers");
    }
    p.manual_scale = std::array<double, 3>{(*it)[0].get<double>(), (*it)[1].get<double>(), (*it)[2].get<double>()};
  }
  if (auto it = msg.find("offset"); it != msg.end() && !it->is_null()) {
    p.offset = json_codec::pose_from_json(*it, "offset");
  }
  p.opacity = optional_field<double>(msg, "opacity");
  p.visible = optional_field<bool>(msg, "visible");
  p.auto_scale_enabled = optional_field<bool>(msg, "auto_scale_enabled");
  p.auto_scale_once = optional_field<bool>(msg, "auto_scale_once");
  p.uniform_scale = optional_field<bool>(msg, "uniform_scale");
  p.smoothing_alpha = optional_field<double>(msg, "smoothing_alpha");
  p.reset_scale = optional_field<bool>(msg, "reset_scale");
  try {
    state_ = set_manual(state_, p);
  } catch (const Error& e) {
    out.push_back(error_message(WireError::Parse, e.what(), false));
  }
}

void SessionHandler::on_record_start(const Json& msg, std::vector<std::string>& out) {
  auto it = msg.find("name");
  const std::string name = (it != msg.end() && it->is_string()) ? it->get<std::string>() : std::string{};
  if (!path_safe_name(name)) {
    out.push_back(error_message(WireError::Parse, "record name must match [A-Za-z0-9_-]{1,64}", false));
    return;
  }
  recording_.reset();
  std::filesystem::create_directories(ctx_.record_dir);

  SessionHeader header = header_;
  header.notes = "recorded by session " + session_id_;
  if (!uploaded_glb_.empty()) {
    header.model_ref = name + ".glb";
    std::ofstream glb(ctx_.record_dir / header.model_ref, std::ios::binary);
    glb.write(reinterpret_cast<const char*>(uploaded_glb_.data()), static_cast<std::streamsize>(uploaded_glb_.size()));
  }
  auto rec = std::make_unique<Recording>();
  rec->file.open(ctx_.record_dir / (name + ".jsonl"));
  if (!rec->file) {
    out.push_back(error_message(WireError::Internal, "cannot open recording file for " + name, false));
    return;
  }
  rec->writer.emplace(rec->file, header);
  recording_ = std::move(rec);
}

void SessionHandler::on_record_stop(std::vector<std::string>&) { recording_.reset(); }

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  using namespace boost::archive::iterators;
  using Decoder = transform_width<binary_from_base64<std::string::const_iterator>, 8, 6>;

  std::string clean;
  clean.reserve(text.size());
  for (char c : text) {
    if (c != '\n' && c != '\r' && c != ' ') clean.push_back(c);
  }
  std::size_t pad = 0;
  while (!clean.empty() && clean.back() == '=' && pad < 2) {
    clean.pop_back();
    ++pad;
  }
  if (clean.size() % 4 == 1) throw std::invalid_argument("base64 input has an impossible length");
  const std::size_t out_len = clean.size() * 3 / 4;
  while (clean.size() % 4 != 0) clean.push_back('A');
  std::vector<std::uint8_t> out;
  out.reserve(clean.size() * 3 / 4);
  try {
    for (Decoder it(clean.cbegin()), end(clean.cend()); it != end; ++it) out.push_back(static_cast<std::uint8_t>(*it));
  } catch (const std::exception&) {
    throw std::invalid_argument("invalid base64 character");
  }
  out.resize(std::min(out.size(), out_len));
  return out;
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  using namespace boost::archive::iterators;
  using Encoder = base64_from_binary<transform_width<const std::uint8_t*, 6, 8>>;
  std::string out(Encoder(bytes.data()), Encoder(bytes.data() + bytes.size()));
  out.append((3 - bytes.size() % 3) % 3, '=');
  return out;
}

}  // namespace arreg::protocol
