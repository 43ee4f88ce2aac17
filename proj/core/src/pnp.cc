#include "vlbench/pnp.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace vlbench {
namespace {

using Poly = std::vector<double>;  // ascending powers

Poly Multiply(const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

Poly Add(Poly a, const Poly& b, double scale = 1.0) {
  if (a.size() < b.size()) a.resize(b.size(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += scale * b[i];
  return a;
}

double Evaluate(std::span<const double> coeffs, double x) {
  double value = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
    value = value * x + *it;
  }
  return value;
}

double EvaluateDerivative(std::span<const double> coeffs, double x) {
  double value = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 1;) {
    value = value * x + static_cast<double>(i) * coeffs[i];
  }
  return value;
}

// Rotation R and translation t with R * world + t ~ camera.
bool AlignPoints(const std::array<Eigen::Vector3d, 3>& world,
                 const std::array<Eigen::Vector3d, 3>& camera, Pose* pose) {
  Eigen::Vector3d world_mean = Eigen::Vector3d::Zero();
  Eigen::Vector3d camera_mean = Eigen::Vector3d::Zero();
  for (int i = 0; i < 3; ++i) {
    world_mean += world[i];
    camera_mean += camera[i];
  }
  world_mean /= 3.0;
  camera_mean /= 3.0;

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (int i = 0; i < 3; ++i) {
    cov += (world[i] - world_mean) * (camera[i] - camera_mean).transpose();
  }
  const Eigen::JacobiSVD<Eigen::Matrix3d> svd(
      cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d fix = Eigen::Matrix3d::Identity();
  if ((svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0) {
    fix(2, 2) = -1.0;
  }
  const Eigen::Matrix3d r =
      svd.matrixV() * fix * svd.matrixU().transpose();
  if (!r.allFinite()) return false;
  const Eigen::Vector3d t = camera_mean - r * world_mean;
  pose->rotation = Eigen::Quaterniond(r).normalized();
  pose->center = -r.transpose() * t;
  return true;
}

std::optional<Eigen::Vector2d> ProjectFast(const Eigen::Matrix3d& r,
                                           const Eigen::Vector3d& center,
                                           const Eigen::Vector3d& point,
                                           const CameraIntrinsics& k) {
  const Eigen::Vector3d local = r * (point - center);
  if (local.z() <= 0.0) return std::nullopt;
  return Eigen::Vector2d(k.fx * local.x() / local.z() + k.cx,
                         k.fy * local.y() / local.z() + k.cy);
}

std::vector<std::size_t> CollectInliers(
    const Pose& pose, std::span<const Correspondence2D3D> matches,
    const CameraIntrinsics& intrinsics, double threshold_px) {
  const Eigen::Matrix3d r = pose.RotationMatrix();
  const double threshold_sq = threshold_px * threshold_px;
  std::vector<std::size_t> inliers;
  for (std::size_t i = 0; i < matches.size(); ++i) {
    const auto p = ProjectFast(r, pose.center, matches[i].point, intrinsics);
    if (p && (*p - matches[i].pixel).squaredNorm() <= threshold_sq) {
      inliers.push_back(i);
    }
  }
  return inliers;
}

Eigen::Vector3d Bearing(const Eigen::Vector2d& pixel,
                        const CameraIntrinsics& k) {
  return Eigen::Vector3d((pixel.x() - k.cx) / k.fx, (pixel.y() - k.cy) / k.fy,
                         1.0)
      .normalized();
}

Eigen::Matrix3d Skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

double ReprojectionCost(const Pose& pose,
                        std::span<const Correspondence2D3D> all,
                        std::span<const std::size_t> matches,
                        const CameraIntrinsics& k) {
  const Eigen::Matrix3d r = pose.RotationMatrix();
  double cost = 0.0;
  for (std::size_t i : matches) {
    const auto p = ProjectFast(r, pose.center, all[i].point, k);
    if (!p) return std::numeric_limits<double>::infinity();
    cost += (*p - all[i].pixel).squaredNorm();
  }
  return cost;
}

}  // namespace

std::vector<double> RealPolynomialRoots(std::span<const double> coeffs) {
  std::size_t degree = coeffs.size();
  while (degree > 0 && coeffs[degree - 1] == 0.0) --degree;
  if (degree <= 1) return {};
  --degree;  // now the polynomial degree
  const std::span<const double> poly = coeffs.first(degree + 1);

  const double leading = poly[degree];
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
  for (std::size_t i = 0; i < degree; ++i) {
    companion(0, static_cast<Eigen::Index>(i)) =
        -poly[degree - 1 - i] / leading;
  }
  for (std::size_t i = 1; i < degree; ++i) {
    companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) =
        1.0;
  }
  const Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  std::vector<double> roots;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const std::complex<double> z = solver.eigenvalues()[i];
    if (std::abs(z.imag()) > 1e-6 * std::max(1.0, std::abs(z.real()))) {
      continue;
    }
    double x = z.real();
    for (int it = 0; it < 8; ++it) {
      const double d = EvaluateDerivative(poly, x);
      if (d == 0.0) break;
      const double step = Evaluate(poly, x) / d;
      x -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(x))) break;
    }
    roots.push_back(x);
  }
  return roots;
}

std::vector<Pose> SolveP3P(const std::array<Eigen::Vector3d, 3>& bearings,
                           const std::array<Eigen::Vector3d, 3>& points) {
  // Side lengths opposite each bearing pair and the cosines between rays.
  const double a2 = (points[1] - points[2]).squaredNorm();
  const double b2 = (points[0] - points[2]).squaredNorm();
  const double c2 = (points[0] - points[1]).squaredNorm();
  if (a2 < 1e-18 || b2 < 1e-18 || c2 < 1e-18) return {};
  const double cos_alpha = bearings[1].dot(bearings[2]);
  const double cos_beta = bearings[0].dot(bearings[2]);
  const double cos_gamma = bearings[0].dot(bearings[1]);

  // With s2 = u s1 and s3 = v s1, eliminating u from the law-of-cosines
  // system leaves N^2 - 4 cos_gamma N D + 4 D^2 Q = 0, a quartic in v, where
  // u = N(v) / (2 D(v)).
  const double k = (a2 - c2) / b2;
  const double cb = c2 / b2;
  const Poly numer = {1.0 + k, -2.0 * k * cos_beta, k - 1.0};
  const Poly denom = {cos_gamma, -cos_alpha};
  const Poly q = {1.0 - cb, 2.0 * cb * cos_beta, -cb};

  Poly quartic = Multiply(numer, numer);
  quartic = Add(quartic, Multiply(numer, denom), -4.0 * cos_gamma);
  quartic = Add(quartic, Multiply(Multiply(denom, denom), q), 4.0);

  std::vector<Pose> poses;
  for (double v : RealPolynomialRoots(quartic)) {
    if (v <= 0.0) continue;
    const double d = Evaluate(denom, v);
    if (std::abs(d) < 1e-12) continue;
    const double u = Evaluate(numer, v) / (2.0 * d);
    if (u <= 0.0) continue;
    const double s1_sq = b2 / (1.0 + v * v - 2.0 * v * cos_beta);
    if (!(s1_sq > 0.0)) continue;
    const double s1 = std::sqrt(s1_sq);
    const std::array<Eigen::Vector3d, 3> camera = {
        s1 * bearings[0], u * s1 * bearings[1], v * s1 * bearings[2]};
    Pose pose;
    if (AlignPoints(points, camera, &pose)) poses.push_back(pose);
  }
  return poses;
}

Pose RefinePose(const Pose& initial, std::span<const Correspondence2D3D> all,
                std::span<const std::size_t> matches,
                const CameraIntrinsics& k, int max_iterations) {
  if (matches.size() < 3) return initial;
  Pose pose = initial;
  double cost = ReprojectionCost(pose, all, matches, k);
  double lambda = 1e-6;

  for (int it = 0; it < max_iterations; ++it) {
    const Eigen::Matrix3d r = pose.RotationMatrix();
    Eigen::Matrix<double, 6, 6> jtj = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> jtr = Eigen::Matrix<double, 6, 1>::Zero();
    for (std::size_t i : matches) {
      const Eigen::Vector3d local = r * (all[i].point - pose.center);
      const double z = local.z();
      const Eigen::Vector2d residual(
          k.fx * local.x() / z + k.cx - all[i].pixel.x(),
          k.fy * local.y() / z + k.cy - all[i].pixel.y());
      Eigen::Matrix<double, 2, 3> dproj;
      dproj << k.fx / z, 0.0, -k.fx * local.x() / (z * z), 0.0, k.fy / z,
          -k.fy * local.y() / (z * z);
      // Left perturbation R <- exp([w]x) R and c <- c + dc.
      Eigen::Matrix<double, 2, 6> jac;
      jac.leftCols<3>() = -dproj * Skew(local);
      jac.rightCols<3>() = -dproj * r;
      jtj += jac.transpose() * jac;
      jtr += jac.transpose() * residual;
    }

    bool improved = false;
    for (int attempt = 0; attempt < 10; ++attempt) {
      Eigen::Matrix<double, 6, 6> damped = jtj;
      damped.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
      const Eigen::Matrix<double, 6, 1> step = damped.ldlt().solve(-jtr);
      if (!step.allFinite()) break;

      Pose candidate = pose;
      const Eigen::Vector3d w = step.head<3>();
      const double angle = w.norm();
      if (angle > 0.0) {
        candidate.rotation =
            (Eigen::Quaterniond(Eigen::AngleAxisd(angle, w / angle)) *
             pose.rotation)
                .normalized();
      }
      candidate.center += step.tail<3>();
      const double candidate_cost = ReprojectionCost(candidate, all, matches, k);
      if (candidate_cost <= cost) {
        const bool converged =
            step.norm() < 1e-12 || cost - candidate_cost <= 1e-15 * cost;
        pose = candidate;
        cost = candidate_cost;
        lambda = std::max(lambda * 0.1, 1e-12);
        improved = !converged;
        break;
      }
      lambda *= 10.0;
    }
    if (!improved) break;
  }
  return pose;
}

PnpResult EstimatePosePnP(std::span<const Correspondence2D3D> matches,
                          const CameraIntrinsics& intrinsics,
                          const RansacConfig& config) {
  PnpResult result;
  if (matches.size() < 4) {
    result.status = PnpStatus::kInsufficientMatches;
    return result;
  }

  std::vector<Eigen::Vector3d> bearings;
  bearings.reserve(matches.size());
  for (const auto& m : matches) bearings.push_back(Bearing(m.pixel, intrinsics));

  std::mt19937_64 rng(config.seed);
  const std::size_t n = matches.size();
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);

  std::vector<std::size_t> best_inliers;
  Pose best_pose;
  long max_iterations = config.max_iterations;
  int iteration = 0;
  for (; iteration < max_iterations; ++iteration) {
    std::array<std::size_t, 3> sample{};
    sample[0] = pick(rng);
    do { sample[1] = pick(rng); } while (sample[1] == sample[0]);
    do {
      sample[2] = pick(rng);
    } while (sample[2] == sample[0] || sample[2] == sample[1]);

    const std::array<Eigen::Vector3d, 3> rays = {
        bearings[sample[0]], bearings[sample[1]], bearings[sample[2]]};
    const std::array<Eigen::Vector3d, 3> points = {matches[sample[0]].point,
                                                   matches[sample[1]].point,
                                                   matches[sample[2]].point};
    for (const Pose& hypothesis : SolveP3P(rays, points)) {
      std::vector<std::size_t> inliers =
          CollectInliers(hypothesis, matches, intrinsics, config.inlier_px);
      if (inliers.size() > best_inliers.size()) {
        best_inliers = std::move(inliers);
        best_pose = hypothesis;
        const double ratio =
            static_cast<double>(best_inliers.size()) / static_cast<double>(n);
        const double all_good = std::pow(ratio, 3.0);
        if (all_good >= 1.0 - 1e-15) {
          max_iterations = iteration + 1;
        } else {
          const double needed = std::log(1.0 - config.confidence) /
                                std::log(1.0 - all_good);
          if (needed < static_cast<double>(max_iterations)) {
            max_iterations = static_cast<long>(std::ceil(needed));
          }
        }
      }
    }
  }
  result.iterations = iteration;

  if (best_inliers.size() < std::max<std::size_t>(config.min_inliers, 4)) {
    result.status = PnpStatus::kNoConsensus;
    result.inliers = std::move(best_inliers);
    return result;
  }

  Pose pose = best_pose;
  std::vector<std::size_t> inliers = std::move(best_inliers);
  for (int round = 0; round < 3; ++round) {
    pose = RefinePose(pose, matches, inliers, intrinsics);
    std::vector<std::size_t> updated =
        CollectInliers(pose, matches, intrinsics, config.inlier_px);
    if (updated == inliers) break;
    if (updated.size() < inliers.size()) break;
    inliers = std::move(updated);
  }
  pose = RefinePose(pose, matches, inliers, intrinsics);

  result.pose = pose;
  result.inliers = std::move(inliers);
  result.status = result.inliers.size() >= config.min_inliers
                      ? PnpStatus::kSuccess
                      : PnpStatus::kNoConsensus;
  return result;
}

}  // namespace vlbench
