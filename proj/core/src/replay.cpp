#include "arreg/replay.hpp"

namespace arreg {

std::optional<AutoScaleMode> parse_auto_scale_mode(std::string_view text) noexcept {
  if (text == "off") return AutoScaleMode::Off;
  if (text == "oneshot") return AutoScaleMode::OneShot;
  if (text == "continuous") return AutoScaleMode::Continuous;
  return std::nullopt;
}

Replayer::Replayer(const SessionHeader& header, std::shared_ptr<const Mesh> model, const ReplayOptions& opts)
    : k_(intrinsics_from_fov(header.fov_v_deg, header.image_w, header.image_h)),
      state_(RegistrationState::with_model(std::move(model))) {
  ManualParams p;
  p.smoothing_alpha = opts.smoothing_alpha;
  p.uniform_scale = opts.uniform_scale;
  p.auto_scale_enabled = opts.auto_scale == AutoScaleMode::Continuous;
  p.auto_scale_once = opts.auto_scale == AutoScaleMode::OneShot;
  state_ = set_manual(state_, p);
}

std::optional<MetricsRow> Replayer::process(const SessionFrame& frame) {
  last_ = step(state_, frame, k_);
  if (!last_.box_i || last_.box_i->degenerate()) return std::nullopt;
  return make_metrics_row(frame.seq, frame.t_ms, frame.dof_label, frame.angle_deg, *last_.box_i, last_.box_m);
}

std::vector<MetricsRow> replay_session(const Session& session, std::shared_ptr<const Mesh> model,
                                       const ReplayOptions& opts) {
  Replayer replayer(session.header, std::move(model), opts);
  std::vector<MetricsRow> rows;
  rows.reserve(session.frames.size());
  for (const auto& f : session.frames) {
    if (auto row = replayer.process(f)) rows.push_back(*row);
  }
  return rows;
}

}  // namespace arreg
