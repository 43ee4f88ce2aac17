#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "vlbench/challenge.h"
#include "vlbench/chebyshev.h"
#include "vlbench/geometry.h"
#include "vlbench/gt_ranking.h"
#include "vlbench/pnp.h"
#include "vlbench/pose_approx.h"

namespace {

using namespace vlbench;

void BM_SolveP3P(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0.0, 1.0);
  Pose pose;
  pose.center = {0.3, -0.2, 0.1};
  pose.rotation = AxisAngle(Eigen::Vector3d(0.2, 1.0, 0.1).normalized(), 0.4);
  std::array<Eigen::Vector3d, 3> points, bearings;
  for (int i = 0; i < 3; ++i) {
    const Eigen::Vector3d local(g(rng), g(rng), 6.0 + g(rng));
    points[i] = pose.CameraToWorld(local);
    bearings[i] = local.normalized();
  }
  for (auto _ : state) benchmark::DoNotOptimize(SolveP3P(bearings, points));
}
BENCHMARK(BM_SolveP3P);

void BM_FrustumOverlap(benchmark::State& state) {
  const CameraIntrinsics intr{500, 500, 320, 240, 640, 480};
  Pose a;
  Pose b;
  b.center = {2.0, 0.0, 1.0};
  b.rotation = AxisAngle(Eigen::Vector3d::UnitY(), 0.3);
  const Frustum fa = BuildFrustum(a, intr, 0.0, 25.0);
  const Frustum fb = BuildFrustum(b, intr, 0.0, 25.0);
  for (auto _ : state) benchmark::DoNotOptimize(FrustumOverlapScore(fa, fb));
}
BENCHMARK(BM_FrustumOverlap);

void BM_Barycentric(benchmark::State& state) {
  const auto k = static_cast<Eigen::Index>(state.range(0));
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd db(256, k);
  for (Eigen::Index i = 0; i < db.size(); ++i) db.data()[i] = g(rng);
  Eigen::VectorXd q(256);
  for (Eigen::Index i = 0; i < q.size(); ++i) q[i] = g(rng);
  for (auto _ : state) benchmark::DoNotOptimize(WeightsBarycentric(q, db));
}
BENCHMARK(BM_Barycentric)->Arg(5)->Arg(20)->Arg(50);

void BM_BlurScore(benchmark::State& state) {
  GrayImage img{640, 480, std::vector<double>(640 * 480)};
  for (int y = 0; y < 480; ++y) {
    for (int x = 0; x < 640; ++x) img.pixels[y * 640 + x] = ((x / 8 + y / 8) % 2) * 255.0;
  }
  for (auto _ : state) benchmark::DoNotOptimize(ComputeBlurScore(img));
}
BENCHMARK(BM_BlurScore);

}  // namespace
BENCHMARK_MAIN();
