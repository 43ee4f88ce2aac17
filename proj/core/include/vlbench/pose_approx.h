#pragma once

#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "vlbench/geometry.h"

namespace vlbench {

// Weights aligned with retrieval rank; they always sum to one.
using InterpolationWeights = std::vector<double>;

enum class WeightingScheme {
  kEqual,        // EWB
  kBarycentric,  // BDI
  kCosine,       // CSI
};

std::string_view ToString(WeightingScheme scheme);
WeightingScheme ParseWeightingScheme(std::string_view name);

struct CsiConfig {
  double alpha = 8.0;
  // Non-positive cosine similarities are clamped to this value.
  double min_similarity = 1e-12;
};

InterpolationWeights WeightsEqual(std::size_t k);

// Minimizer of ||d_q - sum_i w_i d_i|| subject to sum_i w_i = 1. The
// columns of `database` are the k descriptors. Weights may be negative.
// When several minimizers exist the one with the smallest norm is returned.
InterpolationWeights WeightsBarycentric(const Eigen::VectorXd& query,
                                        const Eigen::MatrixXd& database);

struct CosineWeights {
  InterpolationWeights weights;
  // Number of similarities that were <= 0 and got clamped.
  std::size_t clamped = 0;
};

// w_i proportional to (d_q . d_i)^alpha, evaluated in the log domain so
// that large alpha stays finite.
CosineWeights WeightsCosine(const Eigen::VectorXd& query,
                            const Eigen::MatrixXd& database,
                            const CsiConfig& config = {});

struct InterpolatedPose {
  Pose pose;
  // Set when the blended quaternion nearly cancels; the rotation is then
  // the top-1 rotation and only the position is meaningful.
  bool degenerate = false;
};

// Weighted blend of positions and of quaternions, the latter sign-aligned to
// the first pose before summation and renormalized. For k = 1 the first pose
// is returned unchanged. Throws InvalidArgument on size mismatch or k = 0.
InterpolatedPose InterpolatePose(std::span<const Pose> poses,
                                 std::span<const double> weights);

}  // namespace vlbench
