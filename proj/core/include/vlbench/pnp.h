#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "vlbench/geometry.h"

namespace vlbench {

struct Correspondence2D3D {
  Eigen::Vector2d pixel;
  Eigen::Vector3d point;
};

struct RansacConfig {
  double inlier_px = 8.0;
  std::size_t min_inliers = 12;
  int max_iterations = 10000;
  double confidence = 0.999;
  std::uint64_t seed = 0;
};

enum class PnpStatus { kSuccess, kInsufficientMatches, kNoConsensus };

struct PnpResult {
  PnpStatus status = PnpStatus::kInsufficientMatches;
  Pose pose;
  std::vector<std::size_t> inliers;
  int iterations = 0;
};

// All real P3P solutions (up to four) for three unit bearing vectors in the
// camera frame and their world points. Grunert's formulation.
std::vector<Pose> SolveP3P(const std::array<Eigen::Vector3d, 3>& bearings,
                           const std::array<Eigen::Vector3d, 3>& points);

// Real roots of sum_i coeffs[i] x^i, via companion-matrix eigenvalues
// polished with Newton steps. Leading zero coefficients are dropped.
std::vector<double> RealPolynomialRoots(std::span<const double> coeffs);

// Levenberg-Marquardt on the pixel reprojection error of `matches`
// (indices into `all`), starting from `initial`.
Pose RefinePose(const Pose& initial, std::span<const Correspondence2D3D> all,
                std::span<const std::size_t> matches,
                const CameraIntrinsics& intrinsics, int max_iterations = 30);

// P3P inside RANSAC with adaptive termination, then refinement on the
// consensus set. Deterministic for a fixed config.seed.
PnpResult EstimatePosePnP(std::span<const Correspondence2D3D> matches,
                          const CameraIntrinsics& intrinsics,
                          const RansacConfig& config = {});

}  // namespace vlbench
