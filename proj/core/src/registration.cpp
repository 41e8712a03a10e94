#include "arreg/registration.hpp"

#include <cmath>
#include <string>

#include <Eigen/Geometry>

#include "arreg/error.hpp"
#include "arreg/segmentation.hpp"

namespace arreg {

namespace {

// Blends two poses: translation and per-axis scale linearly, rotation along
// the shortest arc. Column norms carry any scale in the linear block.
RigidPose blend(const RigidPose& from, const RigidPose& to, double alpha) {
  const auto decompose = [](const RigidPose& p, Eigen::Vector3d& scale) {
    Eigen::Matrix3d r;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) r(i, j) = p(i, j);
    }
    for (int j = 0; j < 3; ++j) {
      scale[j] = r.col(j).norm();
      r.col(j) /= scale[j];
    }
    // Re-orthonormalize so small drift does not leak into the quaternion.
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return Eigen::Quaterniond(svd.matrixU() * svd.matrixV().transpose());
  };
  Eigen::Vector3d s0, s1;
  const Eigen::Quaterniond q0 = decompose(from, s0);
  const Eigen::Quaterniond q1 = decompose(to, s1);
  const Eigen::Matrix3d r = q0.slerp(alpha, q1).toRotationMatrix() * (s0 + alpha * (s1 - s0)).asDiagonal();

  RigidPose out;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) out(i, j) = r(i, j);
    out(i, 3) = from(i, 3) + alpha * (to(i, 3) - from(i, 3));
  }
  return out;
}

void check_range(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::RangeError, what);
}

}  // namespace

RegistrationState RegistrationState::with_model(std::shared_ptr<const Mesh> mesh) {
  RegistrationState st;
  st.model = std::move(mesh);
  return st;
}

RigidPose update_pose(RegistrationState& st, const RigidPose& tracked) {
  if (!tracked.is_rigid()) throw Error(ErrorCode::NonRigidPose, "tracked pose is not a valid rigid transform");
  const RigidPose raw = st.offset.is_identity() ? tracked : compose(tracked, st.offset);
  const RigidPose result =
      (st.smoothing_alpha == 1.0 || !st.last_pose) ? raw : blend(*st.last_pose, raw, st.smoothing_alpha);
  st.last_pose = result;
  return result;
}

ScaleFactors compute_scale_factors(const Rect& box_i, const Rect& box_m) {
  if (!(box_m.w > kMinModelBoxPx && box_m.h > kMinModelBoxPx)) {
    throw Error(ErrorCode::DegenerateModelBox, "model box " + std::to_string(box_m.w) + "x" +
                                                   std::to_string(box_m.h) + " is too small to rescale");
  }
  return ScaleFactors{box_i.w / box_m.w, box_i.h / box_m.h}.clamped();
}

PixelPoint face_anchor(const CameraIntrinsics& k, const RegistrationState& st, const RigidPose& model_matrix) {
  const RigidPose face = st.offset.is_identity() ? model_matrix : compose(model_matrix, invert(st.offset));
  return project_point(k, face.translation_part());
}

RigidPose model_to_camera(const RegistrationState& st, const RigidPose& model_matrix) {
  const auto& ms = st.manual_scale;
  if (ms[0] == 1.0 && ms[1] == 1.0 && ms[2] == 1.0) return model_matrix;
  return compose(model_matrix, RigidPose::scaling(ms[0], ms[1], ms[2]));
}

RegistrationState apply_auto_scale(const RegistrationState& st, const Rect& box_i, const CameraIntrinsics& k,
                                   const RigidPose& model_matrix) {
  if (!st.auto_scale_enabled && !st.auto_scale_pending) return st;
  if (!st.model) throw Error(ErrorCode::EmptyMesh, "no model loaded");
  const PixelPoint anchor = face_anchor(k, st, model_matrix);
  const Rect box_m = project_mesh_bbox(k, model_to_camera(st, model_matrix), st.scale, anchor, *st.model);
  const ScaleFactors factors = compute_scale_factors(box_i, box_m);

  RegistrationState next = st;
  next.scale = ScaleFactors{factors.s_w * st.scale.s_w, factors.s_h * st.scale.s_h}.clamped();
  if (next.uniform_scale) next.scale = next.scale.uniform().clamped();
  next.auto_scale_pending = false;
  return next;
}

RegistrationState set_manual(const RegistrationState& st, const ManualParams& params) {
  if (params.manual_scale) {
    for (double v : *params.manual_scale) {
      check_range(std::isfinite(v) && v > 0.0, "manual_scale components must be positive");
    }
  }
  if (params.offset) check_range(params.offset->is_rigid(), "offset must be a valid rigid transform");
  if (params.opacity) check_range(*params.opacity >= 0.0 && *params.opacity <= 1.0, "opacity must lie in [0, 1]");
  if (params.smoothing_alpha) {
    check_range(*params.smoothing_alpha > 0.0 && *params.smoothing_alpha <= 1.0, "smoothing_alpha must lie in (0, 1]");
  }

  RegistrationState next = st;
  if (params.manual_scale) next.manual_scale = *params.manual_scale;
  if (params.offset) {
    next.offset = *params.offset;
    next.last_pose.reset();
  }
  if (params.opacity) next.opacity = *params.opacity;
  if (params.visible) next.visible = *params.visible;
  if (params.auto_scale_enabled) next.auto_scale_enabled = *params.auto_scale_enabled;
  if (params.auto_scale_once && *params.auto_scale_once) next.auto_scale_pending = true;
  if (params.uniform_scale) next.uniform_scale = *params.uniform_scale;
  if (params.smoothing_alpha) next.smoothing_alpha = *params.smoothing_alpha;
  if (params.reset_scale && *params.reset_scale) next.scale = ScaleFactors::unit();
  return next;
}

std::optional<Rect> frame_head_box(const SessionFrame& frame, const CameraIntrinsics& k) {
  if (frame.box) return frame.box;
  if (!frame.mask_rle) return std::nullopt;
  const MaskRle& m = *frame.mask_rle;
  Rect r;
  try {
    r = box_from_rle(m.w, m.h, m.runs);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NoHeadDetected) return std::nullopt;
    throw;
  }
  // Masks may arrive downsampled; map back to image pixels.
  const double sx = static_cast<double>(k.image_w) / m.w;
  const double sy = static_cast<double>(k.image_h) / m.h;
  if (sx == 1.0 && sy == 1.0) return r;
  return Rect{r.x * sx, r.y * sy, r.w * sx, r.h * sy};
}

FrameResult step(RegistrationState& st, const SessionFrame& frame, const CameraIntrinsics& k) {
  if (!frame.pose) throw Error(ErrorCode::NonRigidPose, "frame carries no pose");
  if (!st.model) throw Error(ErrorCode::EmptyMesh, "no model loaded");

  RegistrationState next = st;
  const RigidPose model_matrix = update_pose(next, *frame.pose);
  const PixelPoint anchor = face_anchor(k, next, model_matrix);
  const RigidPose to_camera = model_to_camera(next, model_matrix);
  const std::optional<Rect> box_i = frame_head_box(frame, k);

  Rect box_m = project_mesh_bbox(k, to_camera, next.scale, anchor, *next.model);
  if (box_i && (next.auto_scale_enabled || next.auto_scale_pending)) {
    next = apply_auto_scale(next, *box_i, k, model_matrix);
    box_m = project_mesh_bbox(k, to_camera, next.scale, anchor, *next.model);
  }

  FrameResult out;
  out.seq = frame.seq;
  out.model_matrix = model_matrix;
  out.scale = next.scale;
  out.box_m = box_m;
  out.anchor = anchor;
  out.box_i = box_i;
  out.visible = next.visible;
  out.opacity = next.opacity;
  st = std::move(next);
  return out;
}

}  // namespace arreg
