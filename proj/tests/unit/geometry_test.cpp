#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "arreg/error.hpp"
#include "arreg/geometry.hpp"
#include "support/oracles.hpp"

namespace arreg {
namespace {

// fy = 240 / tan(25 deg), evaluated with 30-digit arbitrary precision.
constexpr double kFy50At480 = 514.681660922294067925502589851;
// u for (1, 0, 2) under that camera: fx * 0.5 + 240.
constexpr double kU50 = 497.340830461147033962751294926;

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no arreg::Error thrown";
  return ErrorCode::Io;
}

TEST(Intrinsics, NinetyDegreesGivesHalfImage) {
  const auto k = intrinsics_from_fov(90.0, 480, 480);
  EXPECT_NEAR(k.fx, 240.0, 1e-12);
  EXPECT_NEAR(k.fy, 240.0, 1e-12);
  EXPECT_EQ(k.cx, 240.0);
  EXPECT_EQ(k.cy, 240.0);
  EXPECT_TRUE(k.valid());
}

TEST(Intrinsics, FiftyDegreesMatchesHighPrecisionValue) {
  const auto k = intrinsics_from_fov(50.0, 480, 480);
  EXPECT_NEAR(k.fy, kFy50At480, 1e-9);
  EXPECT_EQ(k.fx, k.fy);
}

TEST(Intrinsics, PrincipalPointIsImageCenterForNonSquare) {
  const auto k = intrinsics_from_fov(50.0, 640, 480);
  EXPECT_EQ(k.cx, 320.0);
  EXPECT_EQ(k.cy, 240.0);
  EXPECT_NEAR(k.fy, kFy50At480, 1e-9);
}

TEST(Intrinsics, DegenerateFovIsDomainError) {
  EXPECT_EQ(code_of([] { intrinsics_from_fov(0.0, 480, 480); }), ErrorCode::DomainError);
  EXPECT_EQ(code_of([] { intrinsics_from_fov(180.0, 480, 480); }), ErrorCode::DomainError);
  EXPECT_EQ(code_of([] { intrinsics_from_fov(-5.0, 480, 480); }), ErrorCode::DomainError);
  EXPECT_EQ(code_of([] { intrinsics_from_fov(std::nan(""), 480, 480); }), ErrorCode::DomainError);
  EXPECT_EQ(code_of([] { intrinsics_from_fov(60.0, 0, 480); }), ErrorCode::DomainError);
}

TEST(Normalize, Examples) {
  EXPECT_EQ(normalize({0, 0, 2}), (NormalizedPoint{0, 0}));
  EXPECT_EQ(normalize({1, -2, 2}), (NormalizedPoint{0.5, -1.0}));
  EXPECT_EQ(code_of([] { normalize({1, 1, 0}); }), ErrorCode::BehindCamera);
  EXPECT_EQ(code_of([] { normalize({0, 0, 1e-7}); }), ErrorCode::BehindCamera);
  EXPECT_NO_THROW(normalize({0, 0, kMinDepth}));
}

TEST(ProjectPoint, Examples) {
  const auto k90 = intrinsics_from_fov(90.0, 480, 480);
  const auto p = project_point(k90, {0, 0, 2});
  EXPECT_EQ(p.u, 240.0);
  EXPECT_EQ(p.v, 240.0);

  const auto k50 = intrinsics_from_fov(50.0, 480, 480);
  const auto q = project_point(k50, {1, 0, 2});
  EXPECT_NEAR(q.u, kU50, 1e-9);
  EXPECT_EQ(q.v, 240.0);
  const auto h = oracle::project_homogeneous(k50.fx, k50.fy, k50.cx, k50.cy, oracle::identity16(), 1, 0, 2);
  EXPECT_NEAR(q.u, static_cast<double>(h.u), 1e-12);

  EXPECT_EQ(code_of([&] { project_point(k90, {0, 0, -1}); }), ErrorCode::BehindCamera);
}

TEST(ProjectPoint, EqualsIntrinsicsAfterNormalizeExactly) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> xy(-3.0, 3.0), z(0.25, 10.0);
  const auto k = intrinsics_from_fov(63.0, 800, 600);
  for (int i = 0; i < 2000; ++i) {
    const Point3 p{xy(rng), xy(rng), z(rng)};
    EXPECT_EQ(project_point(k, p), apply_intrinsics(k, normalize(p)));
  }
}

TEST(ProjectPoint, InvariantToUniformScaling) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> xy(-2.0, 2.0), z(0.5, 5.0), lam(0.1, 10.0);
  const auto k = intrinsics_from_fov(50.0, 640, 480);
  for (int i = 0; i < 1000; ++i) {
    const Point3 p{xy(rng), xy(rng), z(rng)};
    const double l = lam(rng);
    const auto a = project_point(k, p);
    const auto b = project_point(k, {l * p.x, l * p.y, l * p.z});
    EXPECT_NEAR(a.u, b.u, 1e-9);
    EXPECT_NEAR(a.v, b.v, 1e-9);
  }
}

TEST(ProjectPointFull, Examples) {
  const auto k90 = intrinsics_from_fov(90.0, 480, 480);
  const auto p = project_point_full(k90, RigidPose::translation(0, 0, 1), {0, 0, 1});
  EXPECT_EQ(p.u, 240.0);
  EXPECT_EQ(p.v, 240.0);
  const auto h = oracle::project_homogeneous(k90.fx, k90.fy, k90.cx, k90.cy,
                                             RigidPose::translation(0, 0, 1).row_major(), 0, 0, 1);
  EXPECT_EQ(h.depth, 2.0L);
  EXPECT_EQ(code_of([&] { project_point_full(k90, RigidPose::translation(0, 0, -2), {0, 0, 1}); }),
            ErrorCode::BehindCamera);
}

TEST(ProjectPointFull, MatchesHomogeneousOracleForRandomPoses) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> ang(-40.0, 40.0), off(-0.3, 0.3), xy(-0.2, 0.2);
  const auto k = intrinsics_from_fov(50.0, 640, 480);
  for (int i = 0; i < 500; ++i) {
    const RigidPose t = compose(RigidPose::translation(off(rng), off(rng), 2.0),
                                compose(RigidPose::rotation_y(ang(rng)), RigidPose::rotation_x(ang(rng))));
    const Point3 pw{xy(rng), xy(rng), xy(rng)};
    const auto got = project_point_full(k, t, pw);
    const auto want = oracle::project_homogeneous(k.fx, k.fy, k.cx, k.cy, t.row_major(), pw.x, pw.y, pw.z);
    EXPECT_NEAR(got.u, static_cast<double>(want.u), 1e-9);
    EXPECT_NEAR(got.v, static_cast<double>(want.v), 1e-9);
  }
}

TEST(ProjectScaled, Examples) {
  const auto k90 = intrinsics_from_fov(90.0, 480, 480);
  const auto p = project_scaled(k90, {2, 1}, {0.5, 0});
  EXPECT_NEAR(p.u, 480.0, 1e-12);
  EXPECT_NEAR(p.v, 240.0, 1e-12);
  EXPECT_EQ(project_scaled(k90, {2, 3}, {0, 0}), k90.principal_point());

  const NormalizedPoint pn{0.13, -0.41};
  EXPECT_EQ(project_scaled(k90, ScaleFactors::unit(), pn), apply_intrinsics(k90, pn));
}

TEST(ProjectScaled, OffsetsFromPrincipalPointAreLinear) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> n(-1.0, 1.0), s(0.25, 2.0);
  const auto k = intrinsics_from_fov(50.0, 640, 480);
  for (int i = 0; i < 1000; ++i) {
    const NormalizedPoint pn{n(rng), n(rng)};
    const ScaleFactors sf{s(rng), s(rng)};
    const auto a = project_scaled(k, sf, pn);
    const auto b = project_scaled(k, {2 * sf.s_w, 2 * sf.s_h}, pn);
    EXPECT_NEAR(b.u - k.cx, 2 * (a.u - k.cx), 1e-9);
    EXPECT_NEAR(b.v - k.cy, 2 * (a.v - k.cy), 1e-9);
  }
}

TEST(ProjectScaledAbout, Examples) {
  const auto k90 = intrinsics_from_fov(90.0, 480, 480);
  // nx = (150 - 240) / 240 puts the unscaled projection at (150, 100) with ny likewise.
  const NormalizedPoint pn{(150.0 - 240.0) / 240.0, (100.0 - 240.0) / 240.0};
  const auto base = apply_intrinsics(k90, pn);
  EXPECT_NEAR(base.u, 150.0, 1e-12);
  const auto p = project_scaled_about(k90, {2, 2}, {100, 100}, pn);
  EXPECT_NEAR(p.u, 200.0, 1e-12);
  EXPECT_NEAR(p.v, 100.0, 1e-12);

  EXPECT_EQ(project_scaled_about(k90, ScaleFactors::unit(), {17, -3}, pn), base);
}

TEST(ProjectScaledAbout, ReducesToProjectScaledAtPrincipalPoint) {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> n(-1.0, 1.0), s(0.25, 4.0);
  const auto k = intrinsics_from_fov(50.0, 640, 480);
  for (int i = 0; i < 1000; ++i) {
    const NormalizedPoint pn{n(rng), n(rng)};
    const ScaleFactors sf{s(rng), s(rng)};
    const auto a = project_scaled_about(k, sf, k.principal_point(), pn);
    const auto b = project_scaled(k, sf, pn);
    EXPECT_NEAR(a.u, b.u, 1e-9);
    EXPECT_NEAR(a.v, b.v, 1e-9);
  }
}

TEST(ScaleFactors, ClampAndUniform) {
  EXPECT_EQ((ScaleFactors{10, 0.01}.clamped()), (ScaleFactors{4, 0.25}));
  EXPECT_EQ((ScaleFactors{1.5, 0.5}.clamped()), (ScaleFactors{1.5, 0.5}));
  const auto u = ScaleFactors{4, 1}.uniform();
  EXPECT_NEAR(u.s_w, 2.0, 1e-15);
  EXPECT_EQ(u.s_w, u.s_h);
}

TEST(Compose, IdentityAndInverseExamples) {
  const RigidPose b = compose(RigidPose::translation(1, -2, 3), RigidPose::rotation_z(17));
  EXPECT_EQ(compose(RigidPose::identity(), b), b);
  EXPECT_LE(max_abs_diff(invert(RigidPose::translation(1, 2, 3)), RigidPose::translation(-1, -2, -3)), 0.0);
  const RigidPose r = RigidPose::rotation_x(30);
  EXPECT_LE(max_abs_diff(compose(r, invert(r)), RigidPose::identity()), 1e-12);
}

TEST(Compose, AssociativeOnRandomRigidPoses) {
  std::mt19937_64 rng(16);
  std::uniform_real_distribution<double> ang(-180.0, 180.0), t(-5.0, 5.0), ax(-1.0, 1.0);
  auto random_pose = [&] {
    return compose(RigidPose::translation(t(rng), t(rng), t(rng)),
                   RigidPose::rotation_axis_angle({ax(rng), ax(rng), ax(rng) + 1e-3}, ang(rng)));
  };
  for (int i = 0; i < 500; ++i) {
    const auto a = random_pose(), b = random_pose(), c = random_pose();
    EXPECT_LE(max_abs_diff(compose(compose(a, b), c), compose(a, compose(b, c))), 1e-9);
    EXPECT_LE(max_abs_diff(compose(a, invert(a)), RigidPose::identity()), 1e-9);
    EXPECT_TRUE(a.is_rigid());
    EXPECT_TRUE(a.is_orthonormal());
  }
}

TEST(Invert, SingularThrows) {
  EXPECT_EQ(code_of([] { invert(RigidPose::scaling(1, 0, 1)); }), ErrorCode::Singular);
}

TEST(RigidPose, ColumnMajorRoundTrip) {
  const RigidPose p = compose(RigidPose::translation(1, 2, 3), RigidPose::rotation_y(20));
  const auto cm = p.column_major();
  EXPECT_EQ(cm[12], 1.0);
  EXPECT_EQ(cm[13], 2.0);
  EXPECT_EQ(cm[14], 3.0);
  EXPECT_EQ(RigidPose::from_column_major(cm), p);
  EXPECT_EQ(RigidPose::from_row_major(p.row_major()), p);
}

TEST(RigidPose, RigidityCheck) {
  EXPECT_TRUE(RigidPose::identity().is_rigid());
  RigidPose bad_row;
  bad_row(3, 0) = 0.5;
  EXPECT_FALSE(bad_row.is_rigid());
  RigidPose nan_pose;
  nan_pose(0, 3) = std::nan("");
  EXPECT_FALSE(nan_pose.is_rigid());
  EXPECT_FALSE(RigidPose::scaling(1, 0, 1).is_rigid());
  // Uniformly scaled rotations pass the rigidity gate but are not orthonormal.
  const RigidPose scaled = compose(RigidPose::scaling(2, 2, 2), RigidPose::rotation_z(10));
  EXPECT_TRUE(scaled.is_rigid());
  EXPECT_FALSE(scaled.is_orthonormal());
}

}  // namespace
}  // namespace arreg
