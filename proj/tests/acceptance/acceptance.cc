// One PASS/FAIL line per acceptance criterion. Exit code 0 only when all pass.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Dense>

#include "oracles.h"
#include "test_support.h"
#include "vlbench/benchmark_runner.h"
#include "vlbench/challenge.h"
#include "vlbench/chebyshev.h"
#include "vlbench/correlation.h"
#include "vlbench/geometry.h"
#include "vlbench/gt_ranking.h"
#include "vlbench/localize.h"
#include "vlbench/metrics.h"
#include "vlbench/pnp.h"
#include "vlbench/pose_approx.h"
#include "vlbench/retrieval.h"
#include "vlbench/synth.h"

namespace fs = std::filesystem;
using namespace vlbench;

namespace {

// Tolerances and budgets.
constexpr double kCsiTol = 1e-12;
constexpr double kBdiResidualTol = 1e-10;
constexpr int kBdiSamples = 10000;
constexpr double kRotationTolDeg = 1e-7;
constexpr double kChebyshevGridTol = 1e-2;
constexpr double kPnpPositionTol = 0.01;
constexpr double kPnpRotationTolDeg = 0.1;
constexpr int kPnpMinGood = 95;
constexpr double kE2ePositionTol = 1e-4;
constexpr double kE2eRotationTolDeg = 1e-3;
constexpr double kOracleTol = 1e-12;
constexpr double kRunBudgetS = 300.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<Outcome()> run;
};

std::string Fmt(double v, int precision = 3) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

bool SameBits(const Pose& a, const Pose& b) {
  return std::memcmp(a.center.data(), b.center.data(), sizeof(double) * 3) == 0 &&
         std::memcmp(a.rotation.coeffs().data(), b.rotation.coeffs().data(), sizeof(double) * 4) == 0;
}

std::vector<ImageId> TopIds(const std::vector<RankedImage>& list, std::size_t k) {
  std::vector<ImageId> ids;
  for (std::size_t i = 0; i < k && i < list.size(); ++i) ids.push_back(list[i].id);
  return ids;
}

// 1. k = 1: every interpolation scheme returns the top-1 pose, bit for bit.
Outcome KOneEquivalence() {
  SynthDatasetConfig cfg;
  cfg.scene.n_db = 60;
  cfg.scene.n_query = 100;
  cfg.scene.n_points = 600;
  cfg.scene.seed = 101;
  cfg.features = {{"noisy", {DescriptorMode::kPosePlusNoise, 64, 0.05}}};
  cfg.challenge = false;
  const Dataset ds = BuildSyntheticDataset(cfg);
  const DescriptorTable& desc = ds.descriptors.at("noisy");
  const Ranking ranking = RankByDescriptors(ds.queries, ds.database, desc);

  BenchmarkConfig bc;
  bc.k_grid = {1};
  std::map<WeightingScheme, Cell> cells;
  for (WeightingScheme s : {WeightingScheme::kEqual, WeightingScheme::kBarycentric,
                            WeightingScheme::kCosine}) {
    cells[s] = RunCell(ds, "noisy", false, ranking, Paradigm::kPoseApproximation, s, &desc,
                       nullptr, bc);
  }
  std::size_t identical = 0, n = 0;
  for (std::size_t i = 0; i < ds.queries.size(); ++i) {
    ++n;
    const ImageId q = ds.queries[i];
    const Pose& top = ds.scene.Image(ranking.at(q).front().id).pose;
    const Pose& ewb = cells[WeightingScheme::kEqual].results.at(1)[i].estimated;
    const Pose& bdi = cells[WeightingScheme::kBarycentric].results.at(1)[i].estimated;
    const Pose& csi = cells[WeightingScheme::kCosine].results.at(1)[i].estimated;
    identical += SameBits(ewb, bdi) && SameBits(ewb, csi) && SameBits(ewb, top);
  }
  return {n == 100 && identical == n,
          std::to_string(identical) + "/" + std::to_string(n) + " queries bit-identical"};
}

// 2. Cosine weights with alpha = 0 are the equal weights.
Outcome CsiAlphaZero() {
  std::mt19937_64 rng(202);
  std::normal_distribution<double> g(0.0, 1.0);
  CsiConfig zero;
  zero.alpha = 0.0;
  double worst = 0.0;
  for (int set = 0; set < 100; ++set) {
    Eigen::MatrixXd db(32, 50);
    Eigen::VectorXd q(32);
    for (Eigen::Index i = 0; i < db.size(); ++i) db.data()[i] = g(rng) + 0.5;
    for (Eigen::Index i = 0; i < q.size(); ++i) q[i] = g(rng) + 0.5;
    db.colwise().normalize();
    q.normalize();
    for (int k = 1; k <= 50; ++k) {
      const auto w = WeightsCosine(q, db.leftCols(k), zero).weights;
      for (int i = 0; i < k; ++i) worst = std::max(worst, std::abs(w[i] - 1.0 / k));
    }
  }
  return {worst < kCsiTol, "max deviation " + Fmt(worst)};
}

// 3. Barycentric weights: affine, and no random affine combination does better.
Outcome BdiOptimality() {
  std::mt19937_64 rng(303);
  std::normal_distribution<double> g(0.0, 1.0);
  double worst_residual = 0.0;
  int violations = 0;
  for (int inst = 0; inst < 100; ++inst) {
    const int k = 2 + inst % 19;
    Eigen::MatrixXd db(32, k);
    Eigen::VectorXd q(32);
    for (Eigen::Index i = 0; i < db.size(); ++i) db.data()[i] = g(rng);
    for (Eigen::Index i = 0; i < q.size(); ++i) q[i] = g(rng);
    const auto wv = WeightsBarycentric(q, db);
    const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(wv.data(), k);
    worst_residual = std::max(worst_residual, std::abs(w.sum() - 1.0));
    const double best = (db * w - q).squaredNorm();
    for (int s = 0; s < kBdiSamples; ++s) {
      Eigen::VectorXd v(k);
      for (int i = 0; i < k; ++i) v[i] = g(rng);
      // half fully random, half close to the optimum
      if (s % 2 == 0) v[0] += 1.0 - v.sum();
      else v = w + 1e-3 * (v.array() - v.mean()).matrix();
      const double obj = (db * v - q).squaredNorm();
      if (obj < best - 1e-12 * std::max(1.0, best)) ++violations;
    }
  }
  return {worst_residual < kBdiResidualTol && violations == 0,
          "residual " + Fmt(worst_residual) + ", " + std::to_string(violations) +
              " better samples"};
}

// 4. Rotation error recovers constructed angles; quaternion sign is irrelevant.
Outcome RotationErrorExact() {
  std::mt19937_64 rng(404);
  double worst = 0.0;
  bool sign_exact = true;
  for (int t = 0; t < 250; ++t) {
    Pose a;
    a.rotation = testing::RandomRotation(rng);
    for (double deg : {0.0, 1.0, 90.0, 179.0}) {
      Pose b = a;
      b.rotation = AxisAngle(testing::RandomUnit(rng), DegToRad(deg)) * a.rotation;
      worst = std::max(worst, std::abs(RotationError(a, b) - deg));
      Pose flipped = b;
      flipped.rotation.coeffs() *= -1.0;
      sign_exact &= RotationError(a, flipped) == RotationError(a, b);
      sign_exact &= RotationError(flipped, a) == RotationError(b, a);
    }
  }
  return {worst < kRotationTolDeg && sign_exact,
          "max error " + Fmt(worst) + " deg, sign invariance " + (sign_exact ? "exact" : "broken")};
}

// 5. Inscribed-ball LP against a dense grid search.
Outcome ChebyshevLp() {
  std::vector<HalfSpace> cube;
  for (int axis = 0; axis < 3; ++axis) {
    Eigen::Vector3d n = Eigen::Vector3d::Zero();
    n[axis] = 1.0;
    cube.push_back({n, 1.0});
    cube.push_back({-n, 0.0});
  }
  const double cube_r = ChebyshevCenter(cube).radius;

  const CameraIntrinsics k = testing::DefaultIntrinsics();
  Pose front, back;
  back.rotation = AxisAngle(Eigen::Vector3d::UnitY(), kPi);
  const double disjoint = FrustumOverlapScore(BuildFrustum(front, k, 0, 25), BuildFrustum(back, k, 0, 25));

  std::mt19937_64 rng(505);
  std::normal_distribution<double> g(0.0, 1.0);
  double worst = 0.0;
  int positive = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Pose a = testing::LookingAlongX({0, 0, 0});
    Pose b = testing::LookingAlongX({g(rng) * 4, g(rng) * 4, g(rng)});
    b.rotation = AxisAngle(testing::RandomUnit(rng), DegToRad(20 * g(rng))) * b.rotation;
    const Frustum fa = BuildFrustum(a, k, 0.0, 25.0);
    const Frustum fb = BuildFrustum(b, k, 0.0, 25.0);
    const double score = FrustumOverlapScore(fa, fb);
    std::vector<HalfSpace> both = fa.half_spaces;
    both.insert(both.end(), fb.half_spaces.begin(), fb.half_spaces.end());
    Eigen::Vector3d lo = Eigen::Vector3d::Constant(1e9), hi = -lo;
    for (const auto& c : testing::FrustumCorners(a, k, 0.0, 25.0)) {
      lo = lo.cwiseMin(c);
      hi = hi.cwiseMax(c);
    }
    worst = std::max(worst, std::abs(score - testing::GridChebyshevRadius(both, lo, hi, 60)));
    positive += score > 0.0;
  }
  return {cube_r == 0.5 && disjoint == 0.0 && worst < kChebyshevGridTol,
          "cube " + Fmt(cube_r, 17) + ", disjoint " + Fmt(disjoint) + ", max grid gap " +
              Fmt(worst) + " m over 50 pairs (" + std::to_string(positive) + " overlapping)"};
}

// 6. PnP under 20% outliers and 0.5 px noise.
Outcome PnpRobustness() {
  const CameraIntrinsics k = testing::DefaultIntrinsics();
  int good = 0;
  for (int t = 0; t < 100; ++t) {
    std::mt19937_64 rng(6000 + t);
    std::normal_distribution<double> g(0.0, 0.5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Pose truth = testing::RandomPose(rng);
    auto c = testing::SynthesizeCorrespondences(rng, truth, k, 200);
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i % 5 == 0) c[i].pixel = {u(rng) * k.width, u(rng) * k.height};
      else c[i].pixel += Eigen::Vector2d(g(rng), g(rng));
    }
    RansacConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(t);
    const PnpResult r = EstimatePosePnP(c, k, cfg);
    good += r.status == PnpStatus::kSuccess && PositionError(r.pose, truth) < kPnpPositionTol &&
            RotationError(r.pose, truth) < kPnpRotationTolDeg;
  }
  return {good >= kPnpMinGood, std::to_string(good) + "/100 trials within tolerance"};
}

// 7. Noiseless registration, and the zero-baseline failure.
Outcome NoiselessEndToEnd() {
  SynthDatasetConfig cfg;
  cfg.scene.n_db = 15;
  cfg.scene.n_query = 5;
  cfg.scene.n_points = 500;
  cfg.scene.seed = 707;
  cfg.features = {{"oracle", {DescriptorMode::kPoseOracle}}};
  cfg.matches = {0.0, 0.0, 0};
  cfg.challenge = false;
  const Dataset ds = BuildSyntheticDataset(cfg);
  BenchmarkConfig bc;
  const SceneMap global = BuildGlobalMap(ds, bc);
  const Ranking rcp =
      BuildGtRanking(GtMethod::kRelativePose, ds.queries, ds.database, ds.scene, bc.gt).ranking;

  double worst_m = 0.0, worst_deg = 0.0;
  int ok = 0, total = 0;
  for (ImageId q : ds.queries) {
    const auto retrieved = TopIds(rcp.at(q), 5);
    const ImageRecord& truth = ds.scene.Image(q);
    for (bool local : {false, true}) {
      ++total;
      const LocalizationResult r =
          local ? LocalizeLocalSfm(q, truth.intrinsics, retrieved, ds.scene, ds.matches, bc.localize)
                : LocalizeGlobal(q, truth.intrinsics, retrieved, global, ds.matches, bc.localize);
      if (!r.ok()) continue;
      ++ok;
      worst_m = std::max(worst_m, PositionError(r.estimated, truth.pose));
      worst_deg = std::max(worst_deg, RotationError(r.estimated, truth.pose));
    }
  }

  SynthDatasetConfig corridor = cfg;
  corridor.scene.layout = SceneLayout::kCorridor;
  corridor.scene.spacing_m = 0.0;
  const Dataset cds = BuildSyntheticDataset(corridor);
  const Ranking crcp =
      BuildGtRanking(GtMethod::kRelativePose, cds.queries, cds.database, cds.scene, bc.gt).ranking;
  int too_few = 0;
  for (ImageId q : cds.queries) {
    const auto r = LocalizeLocalSfm(q, cds.scene.Image(q).intrinsics, TopIds(crcp.at(q), 2),
                                    cds.scene, cds.matches, bc.localize);
    too_few += r.status == LocalizationStatus::kTooFewTracks;
  }
  const bool pass = ok == total && worst_m < kE2ePositionTol && worst_deg < kE2eRotationTolDeg &&
                    too_few == static_cast<int>(cds.queries.size());
  return {pass, std::to_string(ok) + "/" + std::to_string(total) + " localized, max " +
                    Fmt(worst_m) + " m / " + Fmt(worst_deg) + " deg; corridor too-few-tracks " +
                    std::to_string(too_few) + "/" + std::to_string(cds.queries.size())};
}

const Cell* FindCell(const ReportBundle& b, const std::string& source, const std::string& method) {
  for (const Cell& c : b.cells) {
    if (c.source == source && c.method == method) return &c;
  }
  return nullptr;
}

std::size_t ThresholdIndex(const BenchmarkConfig& c, double m, double deg) {
  for (std::size_t i = 0; i < c.thresholds.levels.size(); ++i) {
    if (c.thresholds.levels[i].position_m == m && c.thresholds.levels[i].rotation_deg == deg) return i;
  }
  throw InvalidArgument("threshold not configured");
}

// Shared by 8 and 9: the default synthetic dataset (grid layout), as `run`
// generates it.
struct UpperBoundRun {
  BenchmarkConfig config;
  ReportBundle bundle;
};

const UpperBoundRun& UpperBound() {
  static const UpperBoundRun run = [] {
    SynthDatasetConfig cfg;
    cfg.challenge = false;
    UpperBoundRun r;
    const Dataset ds = BuildSyntheticDataset(cfg);
    r.config.paradigms = {Paradigm::kPoseApproximation, Paradigm::kLocalSfm};
    r.config.schemes = {WeightingScheme::kEqual};
    r.config.gt_methods = {GtMethod::kRelativePose, GtMethod::kCoObservation};
    r.config.features = {"noisy", "random"};
    r.bundle = RunBenchmark(ds, r.config);
    return r;
  }();
  return run;
}

std::string Series(const Cell& c, std::size_t t, std::span<const std::size_t> ks) {
  std::string s;
  for (std::size_t k : ks) s += (s.empty() ? "" : " ") + Fmt(c.localized.at(k)[t]);
  return s;
}

// 8. Distance GT ranking bounds pose approximation from noisy descriptors.
Outcome DistanceUpperBound() {
  const UpperBoundRun& r = UpperBound();
  const Cell* gt = FindCell(r.bundle, "gt-rcp", "p1-ewb");
  const Cell* noisy = FindCell(r.bundle, "noisy", "p1-ewb");
  if (!gt || !noisy || gt->error || noisy->error) return {false, "cells missing or failed"};
  const std::size_t t = ThresholdIndex(r.config, 5.0, 10.0);
  int holds = 0;
  for (std::size_t k : r.config.k_grid) holds += gt->localized.at(k)[t] >= noisy->localized.at(k)[t];
  return {holds == static_cast<int>(r.config.k_grid.size()),
          "gt-rcp [" + Series(*gt, t, r.config.k_grid) + "] vs noisy [" +
              Series(*noisy, t, r.config.k_grid) + "]"};
}

// 9. Co-observation GT ranking bounds local SfM from adversarial descriptors.
Outcome CoobsUpperBound() {
  const UpperBoundRun& r = UpperBound();
  const Cell* gt = FindCell(r.bundle, "gt-coobs", "p2a");
  const Cell* adv = FindCell(r.bundle, "random", "p2a");
  if (!gt || !adv || gt->error || adv->error) return {false, "cells missing or failed"};
  const std::size_t t = ThresholdIndex(r.config, 0.25, 2.0);
  const std::array<std::size_t, 3> ks = {5, 10, 20};
  int holds = 0;
  for (std::size_t k : ks) holds += gt->localized.at(k)[t] >= adv->localized.at(k)[t];
  return {holds == 3, "k 5/10/20: gt-coobs [" + Series(*gt, t, ks) + "] vs random [" +
                          Series(*adv, t, ks) + "]"};
}

// 10. Retrieval metrics and correlations against brute-force oracles.
Outcome MetricOracles() {
  std::mt19937_64 rng(1010);
  std::normal_distribution<double> g(0.0, 1.0);
  double worst = 0.0;
  for (int inst = 0; inst < 100; ++inst) {
    const std::size_t n_db = 2 + rng() % 19;
    std::map<ImageId, std::vector<ImageId>> rankings;
    RelevantSetMap rel;
    std::map<ImageId, std::set<ImageId>> sets;
    for (std::uint64_t q = 1; q <= 6; ++q) {
      std::vector<ImageId> db;
      for (std::size_t d = 0; d < n_db; ++d) db.push_back(ImageId(100 + d));
      std::shuffle(db.begin(), db.end(), rng);
      db.resize(1 + rng() % n_db);
      rankings[ImageId(q)] = db;
      std::set<ImageId> s;
      for (std::size_t d = 0; d < n_db; ++d) {
        if (rng() % 3 == 0) s.insert(ImageId(100 + d));
      }
      if (q == 1) s.insert(ImageId(100));
      sets[ImageId(q)] = s;
      rel[ImageId(q)] = std::vector<ImageId>(s.begin(), s.end());
    }
    for (std::size_t k = 1; k <= n_db; ++k) {
      std::size_t hit = 0, eligible = 0;
      double psum = 0.0;
      for (const auto& [q, list] : rankings) {
        worst = std::max(worst, std::abs(PrecisionAtK(list, rel[q], k) -
                                         testing::OraclePrecision(list, sets[q], k)));
        if (sets[q].empty()) continue;
        ++eligible;
        psum += testing::OraclePrecision(list, sets[q], k);
        bool any = false;
        for (std::size_t i = 0; i < k && i < list.size(); ++i) any |= sets[q].count(list[i]) > 0;
        hit += any;
      }
      worst = std::max(worst, std::abs(RecallAtK(rankings, rel, k).recall -
                                       static_cast<double>(hit) / eligible));
      worst = std::max(worst, std::abs(MeanPrecisionAtK(rankings, rel, k) - psum / eligible));
    }
    double apsum = 0.0;
    std::size_t eligible = 0;
    for (const auto& [q, list] : rankings) {
      if (sets[q].empty()) continue;
      apsum += testing::OracleAp(list, sets[q]);
      ++eligible;
    }
    worst = std::max(worst, std::abs(MeanAveragePrecision(rankings, rel).map - apsum / eligible));

    const std::size_t n = 3 + rng() % 20;
    std::vector<double> a(n), b(n);
    for (std::size_t j = 0; j < n; ++j) {
      a[j] = std::round(g(rng) * 3);
      b[j] = 0.5 * a[j] + g(rng);
    }
    const auto p = Pearson(a, b);
    const auto s = Spearman(a, b);
    if (p && s) {
      worst = std::max(worst, std::abs(*p - testing::DirectPearson(a, b)));
      worst = std::max(worst, std::abs(*s - testing::DirectPearson(testing::DirectRanks(a),
                                                                   testing::DirectRanks(b))));
    }
  }
  const double inverted = *Spearman(std::vector<double>{0.9, 0.7, 0.5, 0.1},
                                    std::vector<double>{10, 20, 30, 40});
  return {worst < kOracleTol && inverted == -1.0,
          "max deviation " + Fmt(worst) + ", inverted spearman " + Fmt(inverted, 17)};
}

// 11. avg_k and missing% against a count made straight from the poses.
Outcome GtStatisticsExact() {
  SynthConfig cfg;
  cfg.n_db = 60;
  cfg.n_query = 20;
  cfg.n_missing = 4;
  cfg.n_points = 600;
  cfg.seed = 1111;
  const SynthScene s = GenerateScene(cfg);
  GtConfig gc;
  const GtStatistics stats = ComputeGtStatistics(
      BuildGtRanking(GtMethod::kRelativePose, s.queries, s.database, s.scene, gc).ranking);

  // rank by c/tau_c + R/tau_R, ties by id, keep 50, count those within 25 m and 45 deg
  std::size_t total = 0, missing = 0;
  for (ImageId q : s.queries) {
    const Pose& qp = s.scene.Image(q).pose;
    std::vector<std::tuple<double, ImageId, bool>> scored;
    for (ImageId d : s.database) {
      const Pose& dp = s.scene.Image(d).pose;
      const double dc = (qp.center - dp.center).norm();
      const double dr = testing::TraceAngleDeg(qp, dp);
      scored.emplace_back(dc / 25.0 + dr / 45.0, d, dc <= 25.0 && dr <= 45.0);
    }
    std::sort(scored.begin(), scored.end());
    std::size_t relevant = 0;
    for (std::size_t i = 0; i < 50 && i < scored.size(); ++i) relevant += std::get<2>(scored[i]);
    total += relevant;
    missing += relevant == 0;
  }
  const double n = static_cast<double>(s.queries.size());
  const double avg_k = static_cast<double>(total) / n;
  const double missing_pct = 100.0 * static_cast<double>(missing) / n;
  return {stats.avg_k == avg_k && stats.missing_pct == missing_pct && missing >= cfg.n_missing,
          "avg_k " + Fmt(stats.avg_k, 6) + " (oracle " + Fmt(avg_k, 6) + "), missing " +
              Fmt(stats.missing_pct, 6) + "% (oracle " + Fmt(missing_pct, 6) + "%)"};
}

// 12. Blur score falls with every blur step; a flat image scores zero.
Outcome BlurMonotone() {
  const GrayImage board = testing::Checkerboard(256, 8);
  std::vector<double> mads = {ComputeBlurScore(board).mad};
  for (double sigma : {1.0, 2.0, 4.0, 8.0}) mads.push_back(ComputeBlurScore(GaussianBlur(board, sigma)).mad);
  bool decreasing = true;
  for (std::size_t i = 1; i < mads.size(); ++i) decreasing &= mads[i] < mads[i - 1];
  const GrayImage flat{256, 256, std::vector<double>(256 * 256, 128.0)};
  const double flat_mad = ComputeBlurScore(flat).mad;
  std::string series;
  for (double m : mads) series += (series.empty() ? "" : " ") + Fmt(m, 5);
  return {decreasing && flat_mad == 0.0,
          "mad sigma 0/1/2/4/8: " + series + "; constant " + Fmt(flat_mad)};
}

struct CommandResult {
  int status = -1;
  std::string out;
  double seconds = 0.0;
};

CommandResult RunCommand(const std::string& cmd) {
  CommandResult r;
  const auto start = std::chrono::steady_clock::now();
  FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  while (fgets(buf.data(), static_cast<int>(buf.size()), pipe)) r.out += buf.data();
  r.status = pclose(pipe);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::string ManifestLine(const std::string& out) {
  std::istringstream in(out);
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("manifest ", 0) == 0) return line.substr(9);
  }
  return {};
}

// 13. Two default runs, same manifest hash.
Outcome Determinism(const std::string& cli, const fs::path& workdir) {
  if (cli.empty()) return {false, "no CLI binary given (--cli)"};
  std::vector<CommandResult> runs;
  for (const char* name : {"run_a", "run_b"}) {
    const fs::path out = workdir / name;
    fs::remove_all(out);
    runs.push_back(RunCommand("'" + cli + "' run --out '" + out.string() + "'"));
  }
  const std::string ha = ManifestLine(runs[0].out);
  const std::string hb = ManifestLine(runs[1].out);
  const bool pass = runs[0].status == 0 && runs[1].status == 0 && !ha.empty() && ha == hb &&
                    runs[0].seconds < kRunBudgetS && runs[1].seconds < kRunBudgetS;
  return {pass, "runs " + Fmt(runs[0].seconds) + " s / " + Fmt(runs[1].seconds) +
                    " s, exit " + std::to_string(runs[0].status) + "/" +
                    std::to_string(runs[1].status) + ", manifest " + (ha.empty() ? "?" : ha) +
                    (ha == hb ? " (identical)" : " vs " + (hb.empty() ? "?" : hb))};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::string cli;
  std::string workdir = (fs::temp_directory_path() / "vlbench_acceptance").string();
  app.add_option("--cli", cli, "vlbench binary used for the full-pipeline check");
  app.add_option("--workdir", workdir, "scratch directory");
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(workdir);

  const std::vector<Criterion> criteria = {
      {1, "k1-interpolation-equivalence", 1.0, KOneEquivalence},
      {2, "csi-alpha0-equals-ewb", 1.0, CsiAlphaZero},
      {3, "bdi-optimality", 10.0, BdiOptimality},
      {4, "rotation-error-exactness", 1.0, RotationErrorExact},
      {5, "chebyshev-lp", 30.0, ChebyshevLp},
      {6, "pnp-robustness", 60.0, PnpRobustness},
      {7, "noiseless-end-to-end", 60.0, NoiselessEndToEnd},
      {8, "distance-gt-upper-bound-p1", 120.0, DistanceUpperBound},
      {9, "coobs-gt-upper-bound-p2a", 120.0, CoobsUpperBound},
      {10, "metric-oracles", 10.0, MetricOracles},
      {11, "gt-statistics", 1.0, GtStatisticsExact},
      {12, "blur-monotonicity", 5.0, BlurMonotone},
      {13, "pipeline-determinism", 2 * kRunBudgetS, [&] { return Determinism(cli, workdir); }},
  };

  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::cout << (pass ? "PASS" : "FAIL") << "  [" << c.id << "] " << c.name << ": " << o.detail
              << " (" << Fmt(secs) << " s, budget " << Fmt(c.budget_s) << " s"
              << (in_time ? "" : ", over budget") << ")" << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
