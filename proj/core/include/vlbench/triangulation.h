#pragma once

#include <span>
#include <string_view>

#include <Eigen/Core>

#include "vlbench/geometry.h"

namespace vlbench {

struct TriangulationConfig {
  double min_angle_deg = 1.0;
  double max_residual_px = 4.0;
};

struct ViewObservation {
  Pose pose;
  CameraIntrinsics intrinsics;
  Eigen::Vector2d pixel;
};

enum class TriangulationStatus {
  kOk,
  kTooFewViews,
  kSmallAngle,     // near-parallel rays, including zero baseline
  kCheirality,     // behind at least one camera
  kLargeResidual,  // reprojection error above the map tolerance
};

std::string_view ToString(TriangulationStatus status);

struct TriangulationResult {
  TriangulationStatus status = TriangulationStatus::kTooFewViews;
  Eigen::Vector3d point = Eigen::Vector3d::Zero();

  bool ok() const { return status == TriangulationStatus::kOk; }
};

// Linear multi-view (DLT) triangulation in normalized image coordinates,
// followed by cheirality, triangulation-angle and residual checks.
TriangulationResult TriangulateMultiView(std::span<const ViewObservation> views,
                                         const TriangulationConfig& config = {});

}  // namespace vlbench
