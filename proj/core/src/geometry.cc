#include "vlbench/geometry.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace vlbench {

void CameraIntrinsics::Validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw InvalidArgument("focal lengths must be positive");
  }
  if (width <= 0 || height <= 0) {
    throw InvalidArgument("image size must be positive");
  }
  if (!(cx > 0.0 && cx < width && cy > 0.0 && cy < height)) {
    throw InvalidArgument("principal point must lie inside the image");
  }
}

bool Frustum::Contains(const Eigen::Vector3d& x, double tolerance) const {
  return std::all_of(half_spaces.begin(), half_spaces.end(),
                     [&](const HalfSpace& h) {
                       return h.SignedDistance(x) <= tolerance;
                     });
}

QuaternionStatus NormalizeQuaternion(Eigen::Quaterniond* q) {
  const double norm = q->norm();
  if (!(norm >= 1e-9)) {
    throw InvalidArgument("quaternion norm " + std::to_string(norm) +
                          " is too small to normalize");
  }
  if (std::abs(norm - 1.0) > 1e-6) {
    q->coeffs() /= norm;
    return QuaternionStatus::kNormalized;
  }
  return QuaternionStatus::kUnit;
}

double PositionError(const Pose& estimated, const Pose& reference) {
  return (estimated.center - reference.center).norm();
}

double RotationError(const Pose& estimated, const Pose& reference) {
  // Same angle as arccos((trace(R_est^-1 R_ref) - 1) / 2), evaluated through
  // the relative quaternion so it stays accurate near 0 and 180 degrees.
  const Eigen::Quaterniond relative =
      estimated.rotation.conjugate() * reference.rotation;
  const double sin_half = relative.vec().norm();
  const double cos_half = std::abs(relative.w());
  const double angle = 2.0 * std::atan2(sin_half, cos_half);
  return std::clamp(RadToDeg(angle), 0.0, 180.0);
}

PoseError ComputePoseError(const Pose& estimated, const Pose& reference) {
  return {PositionError(estimated, reference),
          RotationError(estimated, reference)};
}

std::optional<Eigen::Vector2d> Project(const Eigen::Vector3d& world,
                                       const Pose& pose,
                                       const CameraIntrinsics& intrinsics) {
  const Eigen::Vector3d local = pose.WorldToCamera(world);
  if (local.z() <= 0.0) return std::nullopt;
  return Eigen::Vector2d(intrinsics.fx * local.x() / local.z() + intrinsics.cx,
                         intrinsics.fy * local.y() / local.z() + intrinsics.cy);
}

Frustum BuildFrustum(const Pose& pose, const CameraIntrinsics& intrinsics,
                     double near, double far) {
  if (!(near >= 0.0)) throw InvalidArgument("near distance must be >= 0");
  if (!(far > near)) throw InvalidArgument("far distance must exceed near");

  const double w = intrinsics.width;
  const double h = intrinsics.height;
  // Camera-frame planes through the optical center, one per image border.
  std::vector<HalfSpace> local = {
      {Eigen::Vector3d(-intrinsics.fx, 0.0, -intrinsics.cx), 0.0},
      {Eigen::Vector3d(intrinsics.fx, 0.0, intrinsics.cx - w), 0.0},
      {Eigen::Vector3d(0.0, -intrinsics.fy, -intrinsics.cy), 0.0},
      {Eigen::Vector3d(0.0, intrinsics.fy, intrinsics.cy - h), 0.0},
      {Eigen::Vector3d::UnitZ(), far},
  };
  if (near > 0.0) local.push_back({-Eigen::Vector3d::UnitZ(), -near});

  const Eigen::Matrix3d camera_to_world = pose.RotationMatrix().transpose();
  Frustum frustum;
  frustum.half_spaces.reserve(local.size());
  for (const HalfSpace& plane : local) {
    const double norm = plane.normal.norm();
    HalfSpace world;
    world.normal = camera_to_world * (plane.normal / norm);
    world.normal.normalize();
    world.offset = plane.offset / norm + world.normal.dot(pose.center);
    frustum.half_spaces.push_back(world);
  }
  return frustum;
}

Eigen::Quaterniond AxisAngle(const Eigen::Vector3d& axis, double angle_rad) {
  return Eigen::Quaterniond(Eigen::AngleAxisd(angle_rad, axis.normalized()));
}

}  // namespace vlbench
