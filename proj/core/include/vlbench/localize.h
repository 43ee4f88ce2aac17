#pragma once

#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "vlbench/geometry.h"
#include "vlbench/pnp.h"
#include "vlbench/scene_map.h"
#include "vlbench/triangulation.h"
#include "vlbench/types.h"

namespace vlbench {

using ImagePair = std::pair<ImageId, ImageId>;

struct PixelMatch {
  Eigen::Vector2d first;
  Eigen::Vector2d second;
};

// 2D-2D correspondences per unordered image pair.
class MatchStore {
 public:
  void Add(ImageId a, const Eigen::Vector2d& pixel_a, ImageId b,
           const Eigen::Vector2d& pixel_b);

  // Matches oriented so that `first` pixels belong to `from`.
  std::vector<PixelMatch> Between(ImageId from, ImageId to) const;
  bool Contains(ImageId a, ImageId b) const;

  // Keyed by (smaller id, larger id); `first` pixels belong to the smaller id.
  const std::map<ImagePair, std::vector<PixelMatch>>& Pairs() const {
    return pairs_;
  }
  std::size_t size() const;

 private:
  std::map<ImagePair, std::vector<PixelMatch>> pairs_;
};

enum class LocalizationStatus {
  kSuccess,
  kInsufficientMatches,
  kNoConsensus,
  kTooFewTracks,
  kRegistrationFailed,
};

std::string_view ToString(LocalizationStatus status);

struct LocalizationResult {
  ImageId query;
  LocalizationStatus status = LocalizationStatus::kInsufficientMatches;
  Pose estimated;
  std::size_t num_inliers = 0;
  std::optional<PoseError> error;  // set when the reference pose is known

  bool ok() const { return status == LocalizationStatus::kSuccess; }
};

struct LocalizeConfig {
  RansacConfig ransac;
  TriangulationConfig triangulation;
  double lift_radius_px = 1.0;
};

// Turns query <-> database matches into 2D-3D correspondences through the
// database observation nearest to each database pixel (within the lift
// radius), deduplicated per (query pixel, point).
std::vector<Correspondence2D3D> LiftMatches(ImageId query,
                                            std::span<const ImageId> retrieved,
                                            const SceneMap& map,
                                            const MatchStore& matches,
                                            double lift_radius_px);

// Registration against a pre-built map.
LocalizationResult LocalizeGlobal(ImageId query,
                                  const CameraIntrinsics& query_intrinsics,
                                  std::span<const ImageId> retrieved,
                                  const SceneMap& map,
                                  const MatchStore& matches,
                                  const LocalizeConfig& config = {});

struct MapBuildStats {
  std::size_t tracks = 0;
  std::size_t inconsistent_splits = 0;
  std::size_t triangulated = 0;
  std::size_t degenerate = 0;
};

// Links matched pixels of the given image pairs into tracks (union-find that
// refuses to put two pixels of one image in the same track) and triangulates
// every track seen by at least two images. Only tracks that pass the
// triangulation checks become map points. `posed` supplies poses and
// intrinsics.
SceneMap TriangulateTracks(std::span<const ImagePair> pairs,
                           const SceneMap& posed, const MatchStore& matches,
                           const TriangulationConfig& config = {},
                           MapBuildStats* stats = nullptr);

// Local map from all pairwise combinations of the retrieved images, then
// registration as in LocalizeGlobal. Fails with kTooFewTracks when fewer
// points than needed for registration could be triangulated.
LocalizationResult LocalizeLocalSfm(ImageId query,
                                    const CameraIntrinsics& query_intrinsics,
                                    std::span<const ImageId> retrieved,
                                    const SceneMap& posed,
                                    const MatchStore& matches,
                                    const LocalizeConfig& config = {},
                                    MapBuildStats* stats = nullptr);

struct PairSelection {
  enum class Mode { kThreshold, kTopN };
  Mode mode = Mode::kThreshold;
  double min_radius_m = 10.0;
  std::size_t top_n = 50;
  double frustum_near_m = 0.0;
  double frustum_far_m = 25.0;
};

// Image pairs to match when building a global map, chosen by frustum
// overlap. Returned as sorted (smaller id, larger id) pairs.
std::vector<ImagePair> SelectMapPairs(std::span<const ImageId> images,
                                      const SceneMap& posed,
                                      const PairSelection& selection = {});

}  // namespace vlbench
