#include "vlbench/scene_map.h"

#include <algorithm>
#include <limits>
#include <sstream>

namespace vlbench {

void SceneMap::AddImage(ImageId id, const ImageRecord& record) {
  images_[id] = record;
  by_image_.try_emplace(id);
}

void SceneMap::AddPoint(PointId id, const Eigen::Vector3d& position) {
  points_[id] = position;
}

void SceneMap::AddObservation(const Observation& observation) {
  if (!images_.contains(observation.image)) {
    throw InvalidArgument("observation references unknown image " +
                          std::to_string(observation.image.value));
  }
  if (!points_.contains(observation.point)) {
    throw InvalidArgument("observation references unknown point " +
                          std::to_string(observation.point.value));
  }
  const std::size_t index = observations_.size();
  observations_.push_back(observation);
  auto& list = by_image_[observation.image];
  const auto pos = std::upper_bound(
      list.begin(), list.end(), observation.pixel.x(),
      [&](double x, std::size_t i) { return x < observations_[i].pixel.x(); });
  list.insert(pos, index);
  ++point_degree_[observation.point];
}

const ImageRecord& SceneMap::Image(ImageId id) const {
  const auto it = images_.find(id);
  if (it == images_.end()) {
    throw InvalidArgument("unknown image id " + std::to_string(id.value));
  }
  return it->second;
}

const Eigen::Vector3d& SceneMap::Point(PointId id) const {
  const auto it = points_.find(id);
  if (it == points_.end()) {
    throw InvalidArgument("unknown point id " + std::to_string(id.value));
  }
  return it->second;
}

std::vector<const Observation*> SceneMap::ObservationsOf(ImageId id) const {
  std::vector<const Observation*> out;
  const auto it = by_image_.find(id);
  if (it == by_image_.end()) return out;
  out.reserve(it->second.size());
  for (std::size_t i : it->second) out.push_back(&observations_[i]);
  return out;
}

std::vector<PointId> SceneMap::PointsSeenBy(ImageId id) const {
  if (!images_.contains(id)) {
    throw InvalidArgument("unknown image id " + std::to_string(id.value));
  }
  std::vector<PointId> points;
  const auto it = by_image_.find(id);
  if (it != by_image_.end()) {
    points.reserve(it->second.size());
    for (std::size_t i : it->second) points.push_back(observations_[i].point);
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

std::size_t SceneMap::NumObservationsOfPoint(PointId id) const {
  const auto it = point_degree_.find(id);
  return it == point_degree_.end() ? 0 : it->second;
}

std::optional<PointId> SceneMap::FindObservation(ImageId image,
                                                 const Eigen::Vector2d& pixel,
                                                 double radius) const {
  const auto it = by_image_.find(image);
  if (it == by_image_.end()) return std::nullopt;
  const auto& list = it->second;
  auto first = std::lower_bound(
      list.begin(), list.end(), pixel.x() - radius,
      [&](std::size_t i, double x) { return observations_[i].pixel.x() < x; });

  std::optional<PointId> best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (auto i = first; i != list.end(); ++i) {
    const Observation& obs = observations_[*i];
    if (obs.pixel.x() > pixel.x() + radius) break;
    const double dist = (obs.pixel - pixel).norm();
    if (dist <= radius && dist < best_dist) {
      best_dist = dist;
      best = obs.point;
    }
  }
  return best;
}

std::vector<std::string> SceneMap::Validate(double max_residual_px) const {
  std::vector<std::string> issues;
  for (const Observation& obs : observations_) {
    const auto image = images_.find(obs.image);
    const auto point = points_.find(obs.point);
    if (image == images_.end() || point == points_.end()) {
      issues.push_back("dangling observation of point " +
                       std::to_string(obs.point.value) + " in image " +
                       std::to_string(obs.image.value));
      continue;
    }
    const auto projected =
        Project(point->second, image->second.pose, image->second.intrinsics);
    if (!projected) {
      issues.push_back("point " + std::to_string(obs.point.value) +
                       " behind image " + std::to_string(obs.image.value));
      continue;
    }
    const double residual = (*projected - obs.pixel).norm();
    if (residual > max_residual_px) {
      std::ostringstream msg;
      msg << "point " << obs.point.value << " reprojects " << residual
          << " px from its observation in image " << obs.image.value;
      issues.push_back(msg.str());
    }
  }
  for (const auto& [id, position] : points_) {
    if (NumObservationsOfPoint(id) < 2) {
      issues.push_back("point " + std::to_string(id.value) +
                       " has fewer than two observations");
    }
  }
  return issues;
}

}  // namespace vlbench
