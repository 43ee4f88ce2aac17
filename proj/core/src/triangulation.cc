#include "vlbench/triangulation.h"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

namespace vlbench {

std::string_view ToString(TriangulationStatus status) {
  switch (status) {
    case TriangulationStatus::kOk:
      return "ok";
    case TriangulationStatus::kTooFewViews:
      return "too-few-views";
    case TriangulationStatus::kSmallAngle:
      return "small-angle";
    case TriangulationStatus::kCheirality:
      return "cheirality";
    case TriangulationStatus::kLargeResidual:
      return "large-residual";
  }
  return "unknown";
}

TriangulationResult TriangulateMultiView(std::span<const ViewObservation> views,
                                         const TriangulationConfig& config) {
  TriangulationResult result;
  if (views.size() < 2) return result;

  // Work relative to the mean camera center for conditioning.
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  for (const ViewObservation& v : views) origin += v.pose.center;
  origin /= static_cast<double>(views.size());

  double baseline = 0.0;
  for (const ViewObservation& v : views) {
    baseline = std::max(baseline, (v.pose.center - origin).norm());
  }
  if (baseline < 1e-9) {
    result.status = TriangulationStatus::kSmallAngle;
    return result;
  }

  Eigen::MatrixXd design(2 * views.size(), 4);
  for (std::size_t i = 0; i < views.size(); ++i) {
    const ViewObservation& v = views[i];
    const Eigen::Matrix3d r = v.pose.RotationMatrix();
    Eigen::Matrix<double, 3, 4> proj;
    proj.leftCols<3>() = r;
    proj.col(3) = -r * (v.pose.center - origin);
    const double x = (v.pixel.x() - v.intrinsics.cx) / v.intrinsics.fx;
    const double y = (v.pixel.y() - v.intrinsics.cy) / v.intrinsics.fy;
    const auto row = static_cast<Eigen::Index>(2 * i);
    design.row(row) = x * proj.row(2) - proj.row(0);
    design.row(row + 1) = y * proj.row(2) - proj.row(1);
  }

  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeFullV);
  const Eigen::Vector4d homogeneous = svd.matrixV().col(3);
  if (std::abs(homogeneous[3]) < 1e-12 * homogeneous.head<3>().norm()) {
    result.status = TriangulationStatus::kSmallAngle;
    return result;
  }
  const Eigen::Vector3d point = homogeneous.head<3>() / homogeneous[3] + origin;
  result.point = point;

  for (const ViewObservation& v : views) {
    if (v.pose.WorldToCamera(point).z() <= 0.0) {
      result.status = TriangulationStatus::kCheirality;
      return result;
    }
  }

  double max_angle = 0.0;
  for (std::size_t i = 0; i < views.size(); ++i) {
    const Eigen::Vector3d ray_i = (point - views[i].pose.center).normalized();
    for (std::size_t j = i + 1; j < views.size(); ++j) {
      const Eigen::Vector3d ray_j = (point - views[j].pose.center).normalized();
      const double angle =
          std::atan2(ray_i.cross(ray_j).norm(), ray_i.dot(ray_j));
      max_angle = std::max(max_angle, angle);
    }
  }
  if (RadToDeg(max_angle) < config.min_angle_deg) {
    result.status = TriangulationStatus::kSmallAngle;
    return result;
  }

  for (const ViewObservation& v : views) {
    const auto projected = Project(point, v.pose, v.intrinsics);
    if (!projected || (*projected - v.pixel).norm() > config.max_residual_px) {
      result.status = TriangulationStatus::kLargeResidual;
      return result;
    }
  }
  result.status = TriangulationStatus::kOk;
  return result;
}

}  // namespace vlbench
