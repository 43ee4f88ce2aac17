#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "test_support.h"
#include "vlbench/triangulation.h"

namespace vlbench {
namespace {

// Camera at `center` looking at `target`, z up.
Pose LookAt(const Eigen::Vector3d& center, const Eigen::Vector3d& target) {
  const Eigen::Vector3d z = (target - center).normalized();
  Eigen::Vector3d x = Eigen::Vector3d::UnitZ().cross(z);
  if (x.norm() < 1e-6) x = Eigen::Vector3d::UnitX();
  x.normalize();
  const Eigen::Vector3d y = z.cross(x);
  Eigen::Matrix3d r;
  r.row(0) = x;
  r.row(1) = y;
  r.row(2) = z;
  Pose p;
  p.center = center;
  p.rotation = Eigen::Quaterniond(r);
  return p;
}

// Pixel from the pinhole formula, also for points behind the camera.
Eigen::Vector2d RawPixel(const Pose& p, const CameraIntrinsics& k, const Eigen::Vector3d& x) {
  const Eigen::Vector3d l = p.WorldToCamera(x);
  return {k.fx * l.x() / l.z() + k.cx, k.fy * l.y() / l.z() + k.cy};
}

const CameraIntrinsics kK = testing::DefaultIntrinsics();

TEST(Triangulate, TwoNoiselessViewsThirtyDegrees) {
  const Eigen::Vector3d x(1.0, 2.0, 10.0);
  const Eigen::Vector3d c1(0, 0, 0);
  // rotate c1 about x by 30 degrees around the vertical axis
  const Eigen::Vector3d c2 = x + AxisAngle(Eigen::Vector3d::UnitZ(), DegToRad(30)) * (c1 - x);
  const Pose p1 = LookAt(c1, x + Eigen::Vector3d(0.5, 0, 0));
  const Pose p2 = LookAt(c2, x - Eigen::Vector3d(0, 0.3, 0));
  const std::vector<ViewObservation> views = {{p1, kK, RawPixel(p1, kK, x)},
                                              {p2, kK, RawPixel(p2, kK, x)}};
  const auto r = TriangulateMultiView(views);
  ASSERT_TRUE(r.ok()) << ToString(r.status);
  EXPECT_LT((r.point - x).norm(), 1e-6);
}

TEST(Triangulate, ManyViewsRandom) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int t = 0; t < 100; ++t) {
    const Eigen::Vector3d x(u(rng), u(rng), 20 + u(rng));
    std::vector<ViewObservation> views;
    for (int v = 0; v < 2 + t % 4; ++v) {
      const Pose p = LookAt({u(rng) * 2, u(rng) * 2, u(rng)}, x + Eigen::Vector3d(u(rng), u(rng), 0) * 0.3);
      views.push_back({p, kK, RawPixel(p, kK, x)});
    }
    const auto r = TriangulateMultiView(views);
    if (r.status == TriangulationStatus::kSmallAngle) continue;
    ASSERT_TRUE(r.ok()) << ToString(r.status);
    EXPECT_LT((r.point - x).norm(), 1e-6);
  }
}

TEST(Triangulate, ZeroBaselineIsDegenerate) {
  const Eigen::Vector3d x(0, 0, 10);
  const Pose p1 = LookAt({0, 0, 0}, x);
  const Pose p2 = LookAt({0, 0, 0}, x + Eigen::Vector3d(1, 0, 0));
  const std::vector<ViewObservation> views = {{p1, kK, RawPixel(p1, kK, x)},
                                              {p2, kK, RawPixel(p2, kK, x)}};
  EXPECT_EQ(TriangulateMultiView(views).status, TriangulationStatus::kSmallAngle);
}

TEST(Triangulate, BehindOneCamera) {
  const Eigen::Vector3d x(0, 0, 10);
  const Pose p1 = LookAt({-4, 0, 0}, x);
  // second camera past the point, looking away from it
  const Pose p2 = LookAt({6, 0, 18}, {12, 0, 26});
  const std::vector<ViewObservation> views = {{p1, kK, RawPixel(p1, kK, x)},
                                              {p2, kK, RawPixel(p2, kK, x)}};
  EXPECT_EQ(TriangulateMultiView(views).status, TriangulationStatus::kCheirality);
}

TEST(Triangulate, InconsistentPixelsRejected) {
  const Eigen::Vector3d x(0, 0, 10);
  const Pose p1 = LookAt({-3, 0, 0}, x);
  const Pose p2 = LookAt({3, 0, 0}, x);
  const Pose p3 = LookAt({0, 3, 0}, x);
  std::vector<ViewObservation> views = {{p1, kK, RawPixel(p1, kK, x)},
                                        {p2, kK, RawPixel(p2, kK, x)},
                                        {p3, kK, RawPixel(p3, kK, x) + Eigen::Vector2d(0, 60)}};
  EXPECT_EQ(TriangulateMultiView(views).status, TriangulationStatus::kLargeResidual);
  views.pop_back();
  views.pop_back();
  EXPECT_EQ(TriangulateMultiView(views).status, TriangulationStatus::kTooFewViews);
}

}  // namespace
}  // namespace vlbench
