#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "arreg/frame.hpp"
#include "arreg/mesh.hpp"

namespace arreg {

inline constexpr int kSessionFormatVersion = 1;

/// Session files are UTF-8 JSON lines: the header object on line 1, then one
/// frame object per line. Reals are written at shortest round-trip precision.
class SessionWriter {
 public:
  SessionWriter(std::ostream& out, const SessionHeader& header);

  /// Throws Error{NonMonotonicSeq} or Error{MalformedLine} for a frame that
  /// would not read back.
  void write(const SessionFrame& frame);

 private:
  std::ostream& out_;
  std::optional<std::int64_t> last_seq_;
};

/// Streaming reader. The header is parsed on construction.
class SessionReader {
 public:
  /// Throws Error{FormatVersionMismatch} or MalformedLineError for line 1.
  explicit SessionReader(std::istream& in);

  const SessionHeader& header() const noexcept { return header_; }

  /// Next frame, or nullopt at end of stream. Blank lines are skipped.
  /// Throws MalformedLineError or Error{NonMonotonicSeq}.
  std::optional<SessionFrame> next();

  std::size_t line_no() const noexcept { return line_no_; }

 private:
  std::istream& in_;
  SessionHeader header_;
  std::size_t line_no_ = 0;
  std::optional<std::int64_t> last_seq_;
};

struct Session {
  SessionHeader header;
  std::vector<SessionFrame> frames;
};

std::string write_session(const SessionHeader& header, const std::vector<SessionFrame>& frames);
Session read_session(std::istream& in);
Session read_session_string(const std::string& text);
/// Throws Error{Io} when the file cannot be opened.
Session read_session_file(const std::string& path);

struct SynthConfig {
  DofLabel dof = DofLabel::Yaw;
  double max_deg = 45.0;
  int frames = 90;
  /// Ground-truth head semi-axes (x, y, z).
  std::array<double, 3> head_axes = kDefaultHeadAxes;
  /// Head center depth.
  double depth = 0.5;
  /// Gaussian sigma of the rotation perturbation, degrees.
  double noise_rot_deg = 0.0;
  /// Gaussian sigma of the translation perturbation, as a fraction of depth.
  double noise_trans = 0.0;
  /// Registered model's (x, y) semi-axes relative to the ground-truth head.
  std::pair<double, double> scale_mismatch{1.0, 1.0};
  std::uint64_t seed = 0;
  int image_w = 640;
  int image_h = 480;
  double fov_v_deg = kDefaultFovDeg;
  double fps = 30.0;
  /// Sweep 0 -> max -> 0 instead of 0 -> max.
  bool return_sweep = false;
};

/// Throws Error{ConfigError}.
void validate(const SynthConfig& cfg);

/// Ground-truth rotation of frame `k` (always 0 for a static session).
double synth_angle(const SynthConfig& cfg, int k);

/// Noise-free head pose for a rotation angle: T(0, 0, depth) * R(angle).
RigidPose synth_true_pose(const SynthConfig& cfg, double angle_deg);

/// Synthetic DOF sweep. Each frame's box is the projected bounds of the
/// ground-truth head at the noise-free pose; the pose itself carries the
/// configured noise. Deterministic in `cfg`.
Session synth_session(const SynthConfig& cfg);

}  // namespace arreg
