#pragma once

#include <array>
#include <memory>
#include <optional>

#include "arreg/frame.hpp"
#include "arreg/geometry.hpp"
#include "arreg/mesh.hpp"

namespace arreg {

/// Boxes narrower/shorter than this (pixels) cannot drive auto-scaling.
inline constexpr double kMinModelBoxPx = 1e-3;

/// Per-session registration state. Owned by exactly one session task; the
/// free functions below never share it across threads.
struct RegistrationState {
  std::shared_ptr<const Mesh> model;
  /// Model-to-face attachment, applied before the tracked pose.
  RigidPose offset;
  /// Current image-space scale S.
  ScaleFactors scale;
  /// User scale in model space, applied to vertices before any pose.
  std::array<double, 3> manual_scale{1.0, 1.0, 1.0};
  double opacity = 1.0;
  bool visible = true;
  /// Continuous mode: rescale every frame that carries a head box.
  bool auto_scale_enabled = false;
  /// One-shot request: rescale on the next frame that carries a head box.
  bool auto_scale_pending = false;
  /// Replace (s_w, s_h) by their geometric mean when rescaling.
  bool uniform_scale = false;
  /// Blend weight toward the new pose; 1 disables smoothing.
  double smoothing_alpha = 1.0;
  std::optional<RigidPose> last_pose;

  static RegistrationState with_model(std::shared_ptr<const Mesh> mesh);
};

/// Partial update for set_manual(); unset fields are left alone.
struct ManualParams {
  std::optional<std::array<double, 3>> manual_scale;
  std::optional<RigidPose> offset;
  std::optional<double> opacity;
  std::optional<bool> visible;
  std::optional<bool> auto_scale_enabled;
  std::optional<bool> auto_scale_once;
  std::optional<bool> uniform_scale;
  std::optional<double> smoothing_alpha;
  /// Resets S to (1, 1).
  std::optional<bool> reset_scale;
};

struct FrameResult {
  std::int64_t seq = 0;
  /// Tracked pose composed with the offset, after smoothing.
  RigidPose model_matrix;
  ScaleFactors scale;
  /// Projected model boundary B_m.
  Rect box_m;
  /// Projected face origin; the center of image-space scaling.
  PixelPoint anchor;
  /// Head boundary B_i used for this frame, when the frame carried one.
  std::optional<Rect> box_i;
  bool visible = true;
  double opacity = 1.0;
};

/// Applies the offset and optional smoothing to a tracked pose and records
/// the result as the state's last pose.
/// Throws Error{NonRigidPose}.
RigidPose update_pose(RegistrationState& st, const RigidPose& tracked);

/// s_w = w_i / w_m, s_h = h_i / h_m, clamped.
/// Throws Error{DegenerateModelBox} when B_m is thinner than kMinModelBoxPx.
ScaleFactors compute_scale_factors(const Rect& box_i, const Rect& box_m);

/// Projection of the face origin (the model matrix with the offset removed).
PixelPoint face_anchor(const CameraIntrinsics& k, const RegistrationState& st, const RigidPose& model_matrix);

/// Model space to camera space, including the manual scale.
RigidPose model_to_camera(const RegistrationState& st, const RigidPose& model_matrix);

/// Composes the current scale with the factors that make the projected model
/// box match `box_i`. Returns `st` unchanged when neither continuous nor
/// one-shot auto-scaling is active; clears a pending one-shot request.
RegistrationState apply_auto_scale(const RegistrationState& st, const Rect& box_i, const CameraIntrinsics& k,
                                   const RigidPose& model_matrix);

/// Throws Error{RangeError}; `st` is unchanged on failure.
RegistrationState set_manual(const RegistrationState& st, const ManualParams& params);

/// Head boundary carried by a frame: its box, or the box extracted from its
/// mask rescaled to the image size. Empty when neither is present or the
/// mask holds no head.
std::optional<Rect> frame_head_box(const SessionFrame& frame, const CameraIntrinsics& k);

/// Runs one frame of the pipeline: pose update, anchor, B_m, optional
/// auto-scale. Commits to `st` only on success.
/// Throws Error{NonRigidPose}, Error{BehindCamera}, Error{DegenerateModelBox}.
FrameResult step(RegistrationState& st, const SessionFrame& frame, const CameraIntrinsics& k);

}  // namespace arreg
