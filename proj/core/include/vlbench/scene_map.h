#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vlbench/geometry.h"
#include "vlbench/types.h"

namespace vlbench {

struct ImageRecord {
  Pose pose;
  CameraIntrinsics intrinsics;
};

struct Observation {
  ImageId image;
  PointId point;
  Eigen::Vector2d pixel;
};

// Posed images, 3D points and the image <-> point observation graph.
// Iteration order over images and points is by ascending id.
class SceneMap {
 public:
  void AddImage(ImageId id, const ImageRecord& record);
  void AddPoint(PointId id, const Eigen::Vector3d& position);
  // Throws InvalidArgument if the image or point is unknown.
  void AddObservation(const Observation& observation);

  bool HasImage(ImageId id) const { return images_.contains(id); }
  bool HasPoint(PointId id) const { return points_.contains(id); }
  const ImageRecord& Image(ImageId id) const;
  const Eigen::Vector3d& Point(PointId id) const;

  const std::map<ImageId, ImageRecord>& Images() const { return images_; }
  const std::map<PointId, Eigen::Vector3d>& Points() const { return points_; }
  const std::vector<Observation>& Observations() const { return observations_; }

  // Observations of one image, sorted by pixel x coordinate.
  std::vector<const Observation*> ObservationsOf(ImageId id) const;
  // Sorted, duplicate-free.
  std::vector<PointId> PointsSeenBy(ImageId id) const;
  std::size_t NumObservationsOfPoint(PointId id) const;

  // Point observed by `image` whose pixel is nearest to `pixel`, if that
  // nearest observation lies within `radius` pixels.
  std::optional<PointId> FindObservation(ImageId image,
                                         const Eigen::Vector2d& pixel,
                                         double radius) const;

  // Human-readable violations of the map invariants: dangling references,
  // points with fewer than two observations, negative depth, and
  // reprojection residuals above `max_residual_px`. Empty when valid.
  std::vector<std::string> Validate(double max_residual_px = 4.0) const;

 private:
  std::map<ImageId, ImageRecord> images_;
  std::map<PointId, Eigen::Vector3d> points_;
  std::vector<Observation> observations_;
  // Indices into observations_, each list sorted by pixel x.
  std::map<ImageId, std::vector<std::size_t>> by_image_;
  std::map<PointId, std::size_t> point_degree_;
};

}  // namespace vlbench
