#pragma once

#include <array>
#include <span>

namespace arreg {

/// Depths below this are treated as on/behind the camera plane.
inline constexpr double kMinDepth = 1e-6;

/// Default vertical field of view used when a caller does not supply one.
inline constexpr double kDefaultFovDeg = 50.0;

/// Camera frame: +X right, +Y down, looking along +Z; visible points have z > 0.
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Point3&, const Point3&) = default;
};

/// A camera-frame point divided by its depth: (X/Z, Y/Z, 1).
struct NormalizedPoint {
  double nx = 0.0;
  double ny = 0.0;

  friend bool operator==(const NormalizedPoint&, const NormalizedPoint&) = default;
};

struct PixelPoint {
  double u = 0.0;
  double v = 0.0;

  friend bool operator==(const PixelPoint&, const PixelPoint&) = default;
};

struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int image_w = 0;
  int image_h = 0;

  PixelPoint principal_point() const noexcept { return {cx, cy}; }
  bool valid() const noexcept;

  friend bool operator==(const CameraIntrinsics&, const CameraIntrinsics&) = default;
};

/// Per-axis image-space scale (the diagonal of S). Clamped to
/// [kMinScale, kMaxScale] whenever produced by the auto-scaler.
struct ScaleFactors {
  double s_w = 1.0;
  double s_h = 1.0;

  static constexpr double kMinScale = 0.25;
  static constexpr double kMaxScale = 4.0;

  static constexpr ScaleFactors unit() noexcept { return {1.0, 1.0}; }

  ScaleFactors clamped() const noexcept;
  /// Both factors replaced by their geometric mean.
  ScaleFactors uniform() const noexcept;
  bool is_unit() const noexcept { return s_w == 1.0 && s_h == 1.0; }

  friend bool operator==(const ScaleFactors&, const ScaleFactors&) = default;
};

/// 4x4 homogeneous transform. Stored row-major; the wire/file form is
/// column-major and goes through from_column_major()/column_major().
class RigidPose {
 public:
  using Storage = std::array<double, 16>;

  /// Identity.
  constexpr RigidPose() noexcept
      : m_{1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1} {}

  static RigidPose from_row_major(std::span<const double, 16> values) noexcept;
  static RigidPose from_column_major(std::span<const double, 16> values) noexcept;

  static RigidPose identity() noexcept { return {}; }
  static RigidPose translation(double x, double y, double z) noexcept;
  static RigidPose rotation_x(double deg) noexcept;
  static RigidPose rotation_y(double deg) noexcept;
  static RigidPose rotation_z(double deg) noexcept;
  /// Rotation by `deg` about the (normalized) axis.
  static RigidPose rotation_axis_angle(const Point3& axis, double deg);
  static RigidPose scaling(double sx, double sy, double sz) noexcept;

  double operator()(int row, int col) const noexcept { return m_[row * 4 + col]; }
  double& operator()(int row, int col) noexcept { return m_[row * 4 + col]; }

  const Storage& row_major() const noexcept { return m_; }
  Storage column_major() const noexcept;

  Point3 apply(const Point3& p) const noexcept;
  Point3 translation_part() const noexcept { return {m_[3], m_[7], m_[11]}; }

  bool is_identity() const noexcept;
  bool all_finite() const noexcept;
  /// Valid as a tracked pose: finite, bottom row (0,0,0,1) within 1e-9 and
  /// an invertible upper-left block. Scale/shear in the block is tolerated
  /// because face-tracking transforms routinely carry a scale.
  bool is_rigid() const noexcept;
  /// Upper-left block orthonormal with det +1 within `tol`.
  bool is_orthonormal(double tol = 1e-6) const noexcept;
  /// Determinant of the upper-left 3x3 block.
  double linear_determinant() const noexcept;

  friend bool operator==(const RigidPose&, const RigidPose&) = default;

 private:
  Storage m_;
};

/// a * b: apply b first, then a.
RigidPose compose(const RigidPose& a, const RigidPose& b) noexcept;
/// Throws Error{Singular} when the upper-left block is not invertible.
RigidPose invert(const RigidPose& a);

/// Max absolute element difference.
double max_abs_diff(const RigidPose& a, const RigidPose& b) noexcept;

/// Pinhole intrinsics with square pixels and a centered principal point.
/// Throws Error{DomainError} for fov outside (0, 180) or non-positive dims.
CameraIntrinsics intrinsics_from_fov(double fov_v_deg, int image_w, int image_h);

/// Throws Error{BehindCamera} when p.z < kMinDepth.
NormalizedPoint normalize(const Point3& p);

/// K * (nx, ny, 1).
PixelPoint apply_intrinsics(const CameraIntrinsics& k, const NormalizedPoint& pn) noexcept;

/// K * P / Z for a camera-frame point.
PixelPoint project_point(const CameraIntrinsics& k, const Point3& p);

/// Full homogeneous route: z_c * p_c = K * T * P_w.
PixelPoint project_point_full(const CameraIntrinsics& k, const RigidPose& t,
                              const Point3& p_world);

/// K * S * P_n: scales about the principal point.
PixelPoint project_scaled(const CameraIntrinsics& k, const ScaleFactors& s,
                          const NormalizedPoint& pn) noexcept;

/// anchor + S * (K * P_n - anchor). With the anchor at the principal point
/// this is project_scaled() exactly; with unit scale it is the unscaled
/// projection exactly.
PixelPoint project_scaled_about(const CameraIntrinsics& k, const ScaleFactors& s,
                                const PixelPoint& anchor,
                                const NormalizedPoint& pn) noexcept;

}  // namespace arreg
