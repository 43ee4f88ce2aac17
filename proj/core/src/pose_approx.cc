#include "vlbench/pose_approx.h"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/QR>

namespace vlbench {

std::string_view ToString(WeightingScheme scheme) {
  switch (scheme) {
    case WeightingScheme::kEqual:
      return "ewb";
    case WeightingScheme::kBarycentric:
      return "bdi";
    case WeightingScheme::kCosine:
      return "csi";
  }
  return "unknown";
}

WeightingScheme ParseWeightingScheme(std::string_view name) {
  if (name == "ewb") return WeightingScheme::kEqual;
  if (name == "bdi") return WeightingScheme::kBarycentric;
  if (name == "csi") return WeightingScheme::kCosine;
  throw InvalidArgument("unknown weighting scheme '" + std::string(name) +
                        "' (expected ewb, bdi or csi)");
}

InterpolationWeights WeightsEqual(std::size_t k) {
  if (k == 0) throw InvalidArgument("need at least one retrieved image");
  return InterpolationWeights(k, 1.0 / static_cast<double>(k));
}

InterpolationWeights WeightsBarycentric(const Eigen::VectorXd& query,
                                        const Eigen::MatrixXd& database) {
  const Eigen::Index k = database.cols();
  if (k == 0) throw InvalidArgument("need at least one retrieved image");
  if (database.rows() != query.size()) {
    throw InvalidArgument("descriptor dimensions differ");
  }
  if (k == 1) return {1.0};

  // Feasible weights are w = 1/k + P y with P an orthonormal basis of the
  // complement of the all-ones vector. Because 1 is orthogonal to P,
  // ||w||^2 = 1/k + ||y||^2, so the minimum-norm least-squares y gives the
  // minimum-norm optimal w.
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(k);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(ones);
  const Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd basis = q.rightCols(k - 1);

  const Eigen::VectorXd center = ones / static_cast<double>(k);
  const Eigen::MatrixXd reduced = database * basis;
  const Eigen::VectorXd rhs = query - database * center;
  const Eigen::VectorXd y =
      reduced.completeOrthogonalDecomposition().solve(rhs);
  const Eigen::VectorXd w = center + basis * y;
  return InterpolationWeights(w.data(), w.data() + w.size());
}

CosineWeights WeightsCosine(const Eigen::VectorXd& query,
                            const Eigen::MatrixXd& database,
                            const CsiConfig& config) {
  const Eigen::Index k = database.cols();
  if (k == 0) throw InvalidArgument("need at least one retrieved image");
  if (database.rows() != query.size()) {
    throw InvalidArgument("descriptor dimensions differ");
  }
  if (config.alpha < 0.0) throw InvalidArgument("alpha must be >= 0");

  CosineWeights out;
  std::vector<double> log_sim(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < k; ++i) {
    double sim = query.dot(database.col(i));
    if (sim <= 0.0) {
      sim = config.min_similarity;
      ++out.clamped;
    }
    log_sim[static_cast<std::size_t>(i)] = std::log(sim);
  }
  const double log_max = *std::max_element(log_sim.begin(), log_sim.end());

  out.weights.resize(log_sim.size());
  double total = 0.0;
  for (std::size_t i = 0; i < log_sim.size(); ++i) {
    // alpha = 0 must give exactly 1 for every entry, including the clamped
    // ones, so that the scheme reduces to equal weights.
    const double w = config.alpha == 0.0
                         ? 1.0
                         : std::exp(config.alpha * (log_sim[i] - log_max));
    out.weights[i] = w;
    total += w;
  }
  for (double& w : out.weights) w /= total;
  return out;
}

InterpolatedPose InterpolatePose(std::span<const Pose> poses,
                                 std::span<const double> weights) {
  if (poses.empty()) throw InvalidArgument("need at least one pose");
  if (poses.size() != weights.size()) {
    throw InvalidArgument("pose and weight counts differ");
  }
  if (poses.size() == 1) return {poses.front(), false};

  const Eigen::Vector4d reference = poses.front().rotation.coeffs();
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector4d blended = Eigen::Vector4d::Zero();
  for (std::size_t i = 0; i < poses.size(); ++i) {
    center += weights[i] * poses[i].center;
    Eigen::Vector4d q = poses[i].rotation.coeffs();
    if (q.dot(reference) < 0.0) q = -q;
    blended += weights[i] * q;
  }

  InterpolatedPose out;
  out.pose.center = center;
  const double norm = blended.norm();
  if (norm < 1e-9) {
    out.degenerate = true;
    out.pose.rotation = poses.front().rotation;
    return out;
  }
  out.pose.rotation.coeffs() = blended / norm;
  return out;
}

}  // namespace vlbench
