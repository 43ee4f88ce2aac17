#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "vlbench/types.h"

namespace vlbench {

// Camera pose. `rotation` maps world to camera coordinates, so a world point X
// lands at R * (X - center) in the camera frame. Quaternions are (w, x, y, z)
// when written to or read from text.
struct Pose {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();

  Eigen::Matrix3d RotationMatrix() const { return rotation.toRotationMatrix(); }

  Eigen::Vector3d WorldToCamera(const Eigen::Vector3d& world) const {
    return rotation * (world - center);
  }

  Eigen::Vector3d CameraToWorld(const Eigen::Vector3d& local) const {
    return rotation.conjugate() * local + center;
  }
};

struct PoseError {
  double position_m = 0.0;
  double rotation_deg = 0.0;
};

struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  // Throws InvalidArgument unless fx, fy > 0 and the principal point lies
  // strictly inside the image.
  void Validate() const;
  bool Contains(const Eigen::Vector2d& pixel) const {
    return pixel.x() >= 0.0 && pixel.y() >= 0.0 && pixel.x() <= width &&
           pixel.y() <= height;
  }
};

// Interior is {x : normal . x <= offset}.
struct HalfSpace {
  Eigen::Vector3d normal;
  double offset = 0.0;

  double SignedDistance(const Eigen::Vector3d& x) const {
    return normal.dot(x) - offset;
  }
};

struct Frustum {
  std::vector<HalfSpace> half_spaces;

  bool Contains(const Eigen::Vector3d& x, double tolerance = 0.0) const;
};

enum class QuaternionStatus { kUnit, kNormalized };

// Quaternions further than 1e-6 from unit norm are normalized in place and
// reported as kNormalized. Throws InvalidArgument when the norm is below 1e-9.
QuaternionStatus NormalizeQuaternion(Eigen::Quaterniond* q);

double PositionError(const Pose& estimated, const Pose& reference);

// Angle in degrees of the smallest rotation taking one orientation to the
// other; insensitive to the sign of either quaternion.
double RotationError(const Pose& estimated, const Pose& reference);

PoseError ComputePoseError(const Pose& estimated, const Pose& reference);

// Pinhole projection. std::nullopt when the point has non-positive depth.
std::optional<Eigen::Vector2d> Project(const Eigen::Vector3d& world,
                                       const Pose& pose,
                                       const CameraIntrinsics& intrinsics);

// Half-space description of the region that projects inside the image with
// depth in [near, far]. Four side planes, the far plane, and a near plane
// only when near > 0. Throws InvalidArgument if far <= near or near < 0.
Frustum BuildFrustum(const Pose& pose, const CameraIntrinsics& intrinsics,
                     double near, double far);

// Rotation about a unit axis, as a world-to-camera quaternion.
Eigen::Quaterniond AxisAngle(const Eigen::Vector3d& axis, double angle_rad);

constexpr double kPi = 3.14159265358979323846;
constexpr double DegToRad(double deg) { return deg * kPi / 180.0; }
constexpr double RadToDeg(double rad) { return rad * 180.0 / kPi; }

}  // namespace vlbench
