#include <algorithm>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "test_support.h"
#include "vlbench/gt_ranking.h"

namespace vlbench {
namespace {

ImageId I(std::uint64_t v) { return ImageId(v); }
PointId P(std::uint64_t v) { return PointId(v); }

TEST(Rcp, Examples) {
  Pose q, t;
  EXPECT_EQ(RcpScore(q, t), 0.0);
  t.center = {25, 0, 0};
  EXPECT_DOUBLE_EQ(RcpScore(q, t), 1.0);
  t.center = {0, 12.5, 0};
  t.rotation = AxisAngle(Eigen::Vector3d::UnitZ(), DegToRad(22.5));
  EXPECT_NEAR(RcpScore(q, t), 1.0, 1e-12);
}

TEST(Rcp, Symmetric) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 200; ++i) {
    const Pose a = testing::RandomPose(rng), b = testing::RandomPose(rng);
    EXPECT_EQ(RcpScore(a, b), RcpScore(b, a));
  }
}

TEST(Relevance, BinaryRules) {
  GtConfig cfg;
  Pose q, t;
  t.center = {24.9, 0, 0};
  EXPECT_TRUE(IsRelevantRelativePose(q, t, cfg));
  t.center = {25.1, 0, 0};
  EXPECT_FALSE(IsRelevantRelativePose(q, t, cfg));
  t.center = {0, 0, 0};
  t.rotation = AxisAngle(Eigen::Vector3d::UnitY(), DegToRad(46));
  EXPECT_FALSE(IsRelevantRelativePose(q, t, cfg));
  EXPECT_FALSE(IsRelevant(GtMethod::kFrustum, 0.0));
  EXPECT_TRUE(IsRelevant(GtMethod::kFrustum, 1e-6));
  EXPECT_FALSE(IsRelevant(GtMethod::kCoObservation, 0.0));
  EXPECT_TRUE(IsRelevant(GtMethod::kCoObservation, 1.0));
}

TEST(GtMethodNames, RoundTrip) {
  for (GtMethod m : {GtMethod::kRelativePose, GtMethod::kFrustum, GtMethod::kCoObservation}) {
    EXPECT_EQ(ParseGtMethod(ToString(m)), m);
  }
  EXPECT_THROW(ParseGtMethod("nope"), InvalidArgument);
}

// Images 1 (query) and 2..4 with hand-picked shared points.
SceneMap CoobsMap(const std::vector<std::vector<std::uint64_t>>& seen) {
  SceneMap map;
  const CameraIntrinsics k = testing::DefaultIntrinsics();
  for (std::size_t i = 0; i < seen.size(); ++i) {
    map.AddImage(I(i + 1), {testing::LookingAlongX({0, double(i), 0}), k});
  }
  for (std::uint64_t p = 1; p <= 20; ++p) map.AddPoint(P(p), {10, double(p), 0});
  for (std::size_t i = 0; i < seen.size(); ++i) {
    for (std::uint64_t p : seen[i]) map.AddObservation({I(i + 1), P(p), {double(p), 1.0}});
  }
  return map;
}

TEST(CoObservation, Examples) {
  const SceneMap map = CoobsMap({{1, 2, 3}, {2, 3, 5}, {7, 8}});
  EXPECT_EQ(CoObservationScore(I(1), I(2), map), 2u);
  EXPECT_EQ(CoObservationScore(I(2), I(1), map), 2u);
  EXPECT_EQ(CoObservationScore(I(1), I(3), map), 0u);
  EXPECT_EQ(CoObservationScore(I(1), I(1), map), 3u);
  EXPECT_THROW(CoObservationScore(I(1), I(99), map), InvalidArgument);
}

TEST(CoObservation, RankingExcludesZero) {
  // query 1; A = 2 shares nothing, B = 3 shares 7, C = 4 shares 3
  const SceneMap map = CoobsMap({{1, 2, 3, 4, 5, 6, 7, 8, 9, 10},
                                 {15, 16},
                                 {1, 2, 3, 4, 5, 6, 7},
                                 {8, 9, 10}});
  const std::vector<ImageId> q = {I(1)};
  const std::vector<ImageId> db = {I(2), I(3), I(4)};
  const auto gt = BuildGtRanking(GtMethod::kCoObservation, q, db, map);
  const auto& list = gt.ranking.at(I(1));
  ASSERT_EQ(list.size(), 2u);
  EXPECT_EQ(list[0].id, I(3));
  EXPECT_EQ(list[0].score, 7.0);
  EXPECT_EQ(list[1].id, I(4));
  EXPECT_TRUE(list[0].relevant && list[1].relevant);
}

SceneMap LineMap(const std::vector<double>& xs) {
  SceneMap map;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    map.AddImage(I(i + 1), {testing::LookingAlongX({xs[i], 0, 0}), testing::DefaultIntrinsics()});
  }
  return map;
}

TEST(BuildGtRanking, RcpOrdersByDistance) {
  // query at 0; db at 10, 1, 5 m
  const SceneMap map = LineMap({0, 10, 1, 5});
  const std::vector<ImageId> q = {I(1)};
  const std::vector<ImageId> db = {I(2), I(3), I(4)};
  const auto gt = BuildGtRanking(GtMethod::kRelativePose, q, db, map);
  const auto& list = gt.ranking.at(I(1));
  ASSERT_EQ(list.size(), 3u);
  EXPECT_EQ(list[0].id, I(3));
  EXPECT_EQ(list[1].id, I(4));
  EXPECT_EQ(list[2].id, I(2));
  EXPECT_DOUBLE_EQ(list[0].score, 1.0 / 25.0);
}

TEST(BuildGtRanking, SingleImageFirstForEveryMethod) {
  SceneMap map = CoobsMap({{1, 2}, {2, 3}});
  const std::vector<ImageId> q = {I(1)};
  const std::vector<ImageId> db = {I(2)};
  for (GtMethod m : {GtMethod::kRelativePose, GtMethod::kFrustum, GtMethod::kCoObservation}) {
    const auto gt = BuildGtRanking(m, q, db, map);
    ASSERT_EQ(gt.ranking.at(I(1)).size(), 1u);
    EXPECT_EQ(gt.ranking.at(I(1))[0].id, I(2));
  }
}

TEST(BuildGtRanking, TiesByIdTruncationAndDeterminism) {
  std::vector<double> xs(80, 3.0);
  xs[0] = 0.0;
  const SceneMap map = LineMap(xs);
  std::vector<ImageId> db;
  for (std::uint64_t i = 80; i >= 2; --i) db.push_back(I(i));
  const std::vector<ImageId> q = {I(1)};
  GtConfig cfg;
  for (GtMethod m : {GtMethod::kRelativePose, GtMethod::kFrustum}) {
    const auto a = BuildGtRanking(m, q, db, map, cfg);
    const auto b = BuildGtRanking(m, q, db, map, cfg);
    const auto& list = a.ranking.at(I(1));
    ASSERT_EQ(list.size(), 50u);
    for (std::size_t i = 0; i < list.size(); ++i) {
      EXPECT_EQ(list[i].id, I(i + 2));
      EXPECT_EQ(list[i].id, b.ranking.at(I(1))[i].id);
      EXPECT_EQ(list[i].score, b.ranking.at(I(1))[i].score);
    }
  }
}

TEST(BuildGtRanking, ConsistentWithScores) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-20, 20);
  SceneMap map;
  for (std::uint64_t i = 1; i <= 30; ++i) {
    Pose p = testing::LookingAlongX({u(rng), u(rng), 0});
    p.rotation = p.rotation * AxisAngle(Eigen::Vector3d::UnitZ(), DegToRad(u(rng)));
    map.AddImage(I(i), {p, testing::DefaultIntrinsics()});
  }
  std::vector<ImageId> q = {I(1), I(2), I(3)}, db;
  for (std::uint64_t i = 4; i <= 30; ++i) db.push_back(I(i));
  const auto rcp = BuildGtRanking(GtMethod::kRelativePose, q, db, map);
  const auto fr = BuildGtRanking(GtMethod::kFrustum, q, db, map);
  for (ImageId qi : q) {
    const auto& r = rcp.ranking.at(qi);
    for (std::size_t i = 1; i < r.size(); ++i) EXPECT_LE(r[i - 1].score, r[i].score);
    const auto& f = fr.ranking.at(qi);
    for (std::size_t i = 1; i < f.size(); ++i) EXPECT_GE(f[i - 1].score, f[i].score);
    for (const auto& e : f) {
      EXPECT_GT(e.score, 0.0);
      const Frustum a = BuildFrustum(map.Image(qi).pose, testing::DefaultIntrinsics(), 0.0, 25.0);
      const Frustum b = BuildFrustum(map.Image(e.id).pose, testing::DefaultIntrinsics(), 0.0, 25.0);
      EXPECT_EQ(e.score, FrustumOverlapScore(a, b));
    }
  }
}

TEST(GtStatistics, Examples) {
  Ranking full;
  for (std::uint64_t q = 1; q <= 3; ++q) {
    for (std::uint64_t d = 0; d < 50; ++d) full[I(q)].push_back({I(100 + d), 1.0, true});
  }
  auto s = ComputeGtStatistics(full);
  EXPECT_EQ(s.avg_k, 50.0);
  EXPECT_EQ(s.missing_pct, 0.0);

  Ranking quarter;
  quarter[I(1)] = {};
  for (std::uint64_t q = 2; q <= 4; ++q) {
    for (std::uint64_t d = 0; d < 10; ++d) quarter[I(q)].push_back({I(100 + d), 1.0, true});
  }
  s = ComputeGtStatistics(quarter);
  EXPECT_EQ(s.avg_k, 7.5);
  EXPECT_EQ(s.missing_pct, 25.0);

  EXPECT_THROW(ComputeGtStatistics(Ranking{}), InvalidArgument);
}

TEST(GtStatistics, CountsOnlyRelevantEntries) {
  Ranking r;
  r[I(1)] = {{I(10), 0.1, true}, {I(11), 2.0, false}};
  r[I(2)] = {{I(10), 3.0, false}};
  const auto s = ComputeGtStatistics(r);
  EXPECT_EQ(s.avg_k, 0.5);
  EXPECT_EQ(s.missing_pct, 50.0);
}

}  // namespace
}  // namespace vlbench
