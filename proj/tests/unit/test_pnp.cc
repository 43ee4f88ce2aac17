#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.h"
#include "test_support.h"
#include "vlbench/pnp.h"

namespace vlbench {
namespace {

const CameraIntrinsics kK = testing::DefaultIntrinsics();

std::vector<Correspondence2D3D> Synthesize(std::mt19937_64& rng, const Pose& pose, int n) {
  return testing::SynthesizeCorrespondences(rng, pose, kK, n);
}

TEST(Polynomial, KnownRoots) {
  // (x - 1)(x + 2)(x - 3) = x^3 - 2x^2 - 5x + 6
  const std::vector<double> c = {6, -5, -2, 1};
  auto roots = RealPolynomialRoots(c);
  std::sort(roots.begin(), roots.end());
  ASSERT_EQ(roots.size(), 3u);
  EXPECT_NEAR(roots[0], -2, 1e-12);
  EXPECT_NEAR(roots[1], 1, 1e-12);
  EXPECT_NEAR(roots[2], 3, 1e-12);
  // x^2 + 1 has none; leading zero dropped
  EXPECT_TRUE(RealPolynomialRoots(std::vector<double>{1, 0, 1, 0}).empty());
}

TEST(P3P, RecoversTruePoseAmongSolutions) {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 200; ++t) {
    const Pose truth = testing::RandomPose(rng);
    const auto c = Synthesize(rng, truth, 3);
    std::array<Eigen::Vector3d, 3> bearings, points;
    for (int i = 0; i < 3; ++i) {
      bearings[i] = truth.WorldToCamera(c[i].point).normalized();
      points[i] = c[i].point;
    }
    const auto sols = SolveP3P(bearings, points);
    ASSERT_LE(sols.size(), 4u);
    double best = 1e9;
    for (const Pose& s : sols) {
      best = std::min(best, PositionError(s, truth) + RotationError(s, truth));
      // every solution explains the three bearings
      for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR((s.WorldToCamera(points[i]).normalized() - bearings[i]).norm(), 0.0, 1e-6);
      }
    }
    // unrefined; the full estimator gets to 1e-6
    EXPECT_LT(best, 1e-5) << "trial " << t;
  }
}

TEST(Pnp, NoiselessExact) {
  std::mt19937_64 rng(42);
  for (int t = 0; t < 10; ++t) {
    const Pose truth = testing::RandomPose(rng);
    const auto c = Synthesize(rng, truth, 200);
    RansacConfig cfg;
    cfg.seed = t;
    const PnpResult r = EstimatePosePnP(c, kK, cfg);
    ASSERT_EQ(r.status, PnpStatus::kSuccess);
    EXPECT_LT(PositionError(r.pose, truth), 1e-6);
    EXPECT_LT(RotationError(r.pose, truth), 1e-5);
    EXPECT_EQ(r.inliers.size(), 200u);
  }
}

TEST(Pnp, TooFewMatches) {
  std::mt19937_64 rng(43);
  const Pose truth = testing::RandomPose(rng);
  const auto c = Synthesize(rng, truth, 3);
  EXPECT_EQ(EstimatePosePnP(c, kK).status, PnpStatus::kInsufficientMatches);
}

TEST(Pnp, PureOutliersFail) {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Pose truth = testing::RandomPose(rng);
  auto c = Synthesize(rng, truth, 100);
  for (auto& m : c) m.pixel = {u(rng) * kK.width, u(rng) * kK.height};
  RansacConfig cfg;
  cfg.max_iterations = 500;
  cfg.min_inliers = 30;
  EXPECT_EQ(EstimatePosePnP(c, kK, cfg).status, PnpStatus::kNoConsensus);
}

TEST(Pnp, DeterministicForSeed) {
  std::mt19937_64 rng(45);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Pose truth = testing::RandomPose(rng);
  auto c = Synthesize(rng, truth, 100);
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i % 3 == 0) c[i].pixel = {u(rng) * kK.width, u(rng) * kK.height};
    else c[i].pixel += Eigen::Vector2d(g(rng), g(rng));
  }
  RansacConfig cfg;
  cfg.seed = 99;
  const auto a = EstimatePosePnP(c, kK, cfg);
  const auto b = EstimatePosePnP(c, kK, cfg);
  EXPECT_EQ(a.pose.center, b.pose.center);
  EXPECT_EQ(a.pose.rotation.coeffs(), b.pose.rotation.coeffs());
  EXPECT_EQ(a.inliers, b.inliers);
}

TEST(Pnp, RobustToOutliersAndNoise) {
  int good = 0;
  for (int t = 0; t < 100; ++t) {
    std::mt19937_64 rng(1000 + t);
    std::normal_distribution<double> g(0.0, 0.5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Pose truth = testing::RandomPose(rng);
    auto c = Synthesize(rng, truth, 200);
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i < 40) c[i].pixel = {u(rng) * kK.width, u(rng) * kK.height};
      else c[i].pixel += Eigen::Vector2d(g(rng), g(rng));
    }
    RansacConfig cfg;
    cfg.seed = t;
    const auto r = EstimatePosePnP(c, kK, cfg);
    good += r.status == PnpStatus::kSuccess && PositionError(r.pose, truth) < 0.01 &&
            RotationError(r.pose, truth) < 0.1;
  }
  EXPECT_GE(good, 95);
}

TEST(Refine, ConvergesFromPerturbedStart) {
  std::mt19937_64 rng(46);
  const Pose truth = testing::RandomPose(rng);
  const auto c = Synthesize(rng, truth, 50);
  Pose start = truth;
  start.center += Eigen::Vector3d(0.05, -0.03, 0.02);
  start.rotation = AxisAngle({1, 2, 3}, DegToRad(1.0)) * start.rotation;
  std::vector<std::size_t> idx(c.size());
  std::iota(idx.begin(), idx.end(), 0);
  const Pose out = RefinePose(start, c, idx, kK);
  EXPECT_LT(PositionError(out, truth), 1e-8);
  EXPECT_LT(RotationError(out, truth), 1e-6);
}

}  // namespace
}  // namespace vlbench
