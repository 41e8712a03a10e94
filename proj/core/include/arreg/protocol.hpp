#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "arreg/frame.hpp"
#include "arreg/geometry.hpp"
#include "arreg/mesh.hpp"
#include "arreg/registration.hpp"

namespace arreg::protocol {

inline constexpr int kProtocolVersion = 1;
/// Decoded GLB uploads above this size are rejected with MODEL_LOAD.
inline constexpr std::size_t kMaxGlbBytes = 32u << 20;
/// Longest accepted message (a maximal base64 upload plus envelope).
inline constexpr std::size_t kMaxMessageBytes = kMaxGlbBytes / 3 * 4 + (1u << 20);

enum class WireError { NoHello, UnsupportedVersion, Parse, BadPose, ModelLoad, Internal };

std::string_view to_string(WireError code) noexcept;

/// Encodes an err message.
std::string error_message(WireError code, std::string_view msg, bool fatal);

/// Thread-safe cache of immutable meshes shared by every session.
class ModelLibrary {
 public:
  explicit ModelLibrary(std::filesystem::path asset_dir);

  /// Builtins and files below the asset directory. Paths escaping the asset
  /// directory are refused. Throws arreg::Error.
  std::shared_ptr<const Mesh> get(const std::string& model_ref);

  const std::filesystem::path& asset_dir() const noexcept { return asset_dir_; }

 private:
  std::filesystem::path asset_dir_;
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<const Mesh>> cache_;
};

struct ServiceContext {
  std::shared_ptr<ModelLibrary> models;
  /// Where record_start writes <name>.jsonl.
  std::filesystem::path record_dir;
};

/// One connection's protocol state machine. Feed it one message at a time;
/// it returns the reply messages in order. Not thread-safe: each connection
/// owns exactly one handler.
class SessionHandler {
 public:
  SessionHandler(ServiceContext ctx, std::string session_id);
  ~SessionHandler();

  SessionHandler(const SessionHandler&) = delete;
  SessionHandler& operator=(const SessionHandler&) = delete;

  std::vector<std::string> handle(std::string_view message);

  /// True after a fatal error; the transport must close the connection.
  bool closed() const noexcept { return closed_; }
  const std::string& session_id() const noexcept { return session_id_; }
  /// Registration state; valid after a successful hello.
  const RegistrationState& state() const noexcept { return state_; }

 private:
  struct Recording;

  void on_hello(const nlohmann::ordered_json& msg, std::vector<std::string>& out);
  void on_frame(const nlohmann::ordered_json& msg, std::vector<std::string>& out);
  void on_set(const nlohmann::ordered_json& msg, std::vector<std::string>& out);
  void on_record_start(const nlohmann::ordered_json& msg, std::vector<std::string>& out);
  void on_record_stop(std::vector<std::string>& out);
  void fatal(WireError code, std::string_view msg, std::vector<std::string>& out);

  ServiceContext ctx_;
  std::string session_id_;
  bool hello_done_ = false;
  bool closed_ = false;
  CameraIntrinsics intrinsics_;
  SessionHeader header_;
  std::vector<std::uint8_t> uploaded_glb_;
  RegistrationState state_;
  std::unique_ptr<Recording> recording_;
};

/// Standard base64 (RFC 4648) with optional padding. Throws
/// std::invalid_argument on characters outside the alphabet.
std::vector<std::uint8_t> base64_decode(std::string_view text);
std::string base64_encode(std::span<const std::uint8_t> bytes);

}  // namespace arreg::protocol
