#include "arreg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "arreg/error.hpp"

namespace arreg {

namespace {

using Mat4 = Eigen::Matrix<double, 4, 4, Eigen::RowMajor>;

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

Eigen::Map<const Mat4> view(const RigidPose& p) { return Eigen::Map<const Mat4>(p.row_major().data()); }

RigidPose from_mat(const Mat4& m) {
  return RigidPose::from_row_major(std::span<const double, 16>(m.data(), 16));
}

Eigen::Matrix3d linear_block(const RigidPose& p) { return view(p).topLeftCorner<3, 3>(); }

}  // namespace

bool CameraIntrinsics::valid() const noexcept {
  return std::isfinite(fx) && std::isfinite(fy) && fx > 0 && fy > 0 && image_w >= 1 &&
         image_h >= 1 && cx >= 0 && cx <= image_w && cy >= 0 && cy <= image_h;
}

ScaleFactors ScaleFactors::clamped() const noexcept {
  return {std::clamp(s_w, kMinScale, kMaxScale), std::clamp(s_h, kMinScale, kMaxScale)};
}

ScaleFactors ScaleFactors::uniform() const noexcept {
  const double g = std::sqrt(s_w * s_h);
  return {g, g};
}

RigidPose RigidPose::from_row_major(std::span<const double, 16> values) noexcept {
  RigidPose p;
  std::copy(values.begin(), values.end(), p.m_.begin());
  return p;
}

RigidPose RigidPose::from_column_major(std::span<const double, 16> values) noexcept {
  RigidPose p;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) p(r, c) = values[c * 4 + r];
  }
  return p;
}

RigidPose::Storage RigidPose::column_major() const noexcept {
  Storage out{};
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) out[c * 4 + r] = (*this)(r, c);
  }
  return out;
}

RigidPose RigidPose::translation(double x, double y, double z) noexcept {
  RigidPose p;
  p(0, 3) = x;
  p(1, 3) = y;
  p(2, 3) = z;
  return p;
}

RigidPose RigidPose::rotation_x(double deg) noexcept {
  const double c = std::cos(deg_to_rad(deg));
  const double s = std::sin(deg_to_rad(deg));
  RigidPose p;
  p(1, 1) = c;
  p(1, 2) = -s;
  p(2, 1) = s;
  p(2, 2) = c;
  return p;
}

RigidPose RigidPose::rotation_y(double deg) noexcept {
  const double c = std::cos(deg_to_rad(deg));
  const double s = std::sin(deg_to_rad(deg));
  RigidPose p;
  p(0, 0) = c;
  p(0, 2) = s;
  p(2, 0) = -s;
  p(2, 2) = c;
  return p;
}

RigidPose RigidPose::rotation_z(double deg) noexcept {
  const double c = std::cos(deg_to_rad(deg));
  const double s = std::sin(deg_to_rad(deg));
  RigidPose p;
  p(0, 0) = c;
  p(0, 1) = -s;
  p(1, 0) = s;
  p(1, 1) = c;
  return p;
}

RigidPose RigidPose::rotation_axis_angle(const Point3& axis, double deg) {
  Eigen::Vector3d a(axis.x, axis.y, axis.z);
  const double n = a.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error(ErrorCode::DomainError, "rotation axis must be a finite non-zero vector");
  }
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = Eigen::AngleAxisd(deg_to_rad(deg), a / n).toRotationMatrix();
  return from_mat(m);
}

RigidPose RigidPose::scaling(double sx, double sy, double sz) noexcept {
  RigidPose p;
  p(0, 0) = sx;
  p(1, 1) = sy;
  p(2, 2) = sz;
  return p;
}

Point3 RigidPose::apply(const Point3& p) const noexcept {
  const auto& m = m_;
  return {m[0] * p.x + m[1] * p.y + m[2] * p.z + m[3],
          m[4] * p.x + m[5] * p.y + m[6] * p.z + m[7],
          m[8] * p.x + m[9] * p.y + m[10] * p.z + m[11]};
}

bool RigidPose::is_identity() const noexcept { return *this == RigidPose{}; }

bool RigidPose::all_finite() const noexcept {
  return std::all_of(m_.begin(), m_.end(), [](double v) { return std::isfinite(v); });
}

double RigidPose::linear_determinant() const noexcept { return linear_block(*this).determinant(); }

bool RigidPose::is_rigid() const noexcept {
  if (!all_finite()) return false;
  constexpr double kTol = 1e-9;
  if (std::abs(m_[12]) > kTol || std::abs(m_[13]) > kTol || std::abs(m_[14]) > kTol ||
      std::abs(m_[15] - 1.0) > kTol) {
    return false;
  }
  // Scale-normalized determinant: det(R) / product of column norms.
  const Eigen::Matrix3d r = linear_block(*this);
  const double norms = r.col(0).norm() * r.col(1).norm() * r.col(2).norm();
  if (!(norms > 0.0)) return false;
  return std::abs(r.determinant() / norms) > 1e-6;
}

bool RigidPose::is_orthonormal(double tol) const noexcept {
  if (!is_rigid()) return false;
  const Eigen::Matrix3d r = linear_block(*this);
  return (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <= tol &&
         std::abs(r.determinant() - 1.0) <= tol;
}

RigidPose compose(const RigidPose& a, const RigidPose& b) noexcept {
  const Mat4 m = view(a) * view(b);
  return from_mat(m);
}

RigidPose invert(const RigidPose& a) {
  const Eigen::Matrix3d r = linear_block(a);
  const double det = r.determinant();
  if (!std::isfinite(det) || std::abs(det) < 1e-12) {
    throw Error(ErrorCode::Singular, "pose is not invertible (det=" + std::to_string(det) + ")");
  }
  const Eigen::Matrix3d r_inv = r.inverse();
  const Eigen::Vector3d t(a(0, 3), a(1, 3), a(2, 3));
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = r_inv;
  m.topRightCorner<3, 1>() = -(r_inv * t);
  return from_mat(m);
}

double max_abs_diff(const RigidPose& a, const RigidPose& b) noexcept {
  double d = 0.0;
  for (std::size_t i = 0; i < 16; ++i) {
    d = std::max(d, std::abs(a.row_major()[i] - b.row_major()[i]));
  }
  return d;
}

CameraIntrinsics intrinsics_from_fov(double fov_v_deg, int image_w, int image_h) {
  if (!(fov_v_deg > 0.0 && fov_v_deg < 180.0)) {
    throw Error(ErrorCode::DomainError,
                "vertical field of view must lie in (0, 180) degrees, got " + std::to_string(fov_v_deg));
  }
  if (image_w < 1 || image_h < 1) {
    throw Error(ErrorCode::DomainError, "image dimensions must be positive");
  }
  const double fy = (image_h / 2.0) / std::tan(fov_v_deg * std::numbers::pi / 360.0);
  return {fy, fy, image_w / 2.0, image_h / 2.0, image_w, image_h};
}

NormalizedPoint normalize(const Point3& p) {
  if (!(p.z >= kMinDepth)) {
    throw Error(ErrorCode::BehindCamera, "point depth " + std::to_string(p.z) + " is behind the camera");
  }
  return {p.x / p.z, p.y / p.z};
}

PixelPoint apply_intrinsics(const CameraIntrinsics& k, const NormalizedPoint& pn) noexcept {
  return {k.fx * pn.nx + k.cx, k.fy * pn.ny + k.cy};
}

PixelPoint project_point(const CameraIntrinsics& k, const Point3& p) {
  return apply_intrinsics(k, normalize(p));
}

PixelPoint project_point_full(const CameraIntrinsics& k, const RigidPose& t, const Point3& p_world) {
  // T * [X Y Z 1]^T, then divide by the resulting depth z_c.
  const Point3 cam = t.apply(p_world);
  return project_point(k, cam);
}

PixelPoint project_scaled(const CameraIntrinsics& k, const ScaleFactors& s,
                          const NormalizedPoint& pn) noexcept {
  return {k.fx * (s.s_w * pn.nx) + k.cx, k.fy * (s.s_h * pn.ny) + k.cy};
}

PixelPoint project_scaled_about(const CameraIntrinsics& k, const ScaleFactors& s,
                                const PixelPoint& anchor, const NormalizedPoint& pn) noexcept {
  if (s.is_unit()) return apply_intrinsics(k, pn);
  if (anchor == k.principal_point()) return project_scaled(k, s, pn);
  const PixelPoint p = apply_intrinsics(k, pn);
  return {anchor.u + s.s_w * (p.u - anchor.u), anchor.v + s.s_h * (p.v - anchor.v)};
}

}  // namespace arreg
