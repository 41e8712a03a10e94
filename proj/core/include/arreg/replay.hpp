#pragma once

#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "arreg/evaluation.hpp"
#include "arreg/frame.hpp"
#include "arreg/registration.hpp"
#include "arreg/session_io.hpp"

namespace arreg {

enum class AutoScaleMode { Off, OneShot, Continuous };

std::optional<AutoScaleMode> parse_auto_scale_mode(std::string_view text) noexcept;

struct ReplayOptions {
  AutoScaleMode auto_scale = AutoScaleMode::Off;
  double smoothing_alpha = 1.0;
  bool uniform_scale = false;
};

/// Drives the registration pipeline over recorded frames and scores every
/// frame that carries a head box.
class Replayer {
 public:
  /// Throws Error{RangeError} for an invalid alpha, Error{DomainError} for a
  /// header with unusable camera parameters.
  Replayer(const SessionHeader& header, std::shared_ptr<const Mesh> model, const ReplayOptions& opts);

  /// Runs one frame; returns its metrics when the frame carries a
  /// non-degenerate head box.
  std::optional<MetricsRow> process(const SessionFrame& frame);

  const FrameResult& last_result() const noexcept { return last_; }
  const RegistrationState& state() const noexcept { return state_; }
  const CameraIntrinsics& intrinsics() const noexcept { return k_; }

 private:
  CameraIntrinsics k_;
  RegistrationState state_;
  FrameResult last_;
};

std::vector<MetricsRow> replay_session(const Session& session, std::shared_ptr<const Mesh> model,
                                       const ReplayOptions& opts);

}  // namespace arreg
