#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vlbench/challenge.h"
#include "vlbench/data_io.h"
#include "vlbench/geometry.h"
#include "vlbench/localize.h"
#include "vlbench/retrieval.h"
#include "vlbench/scene_map.h"
#include "vlbench/types.h"

namespace vlbench {

enum class SceneLayout {
  kGrid,      // handheld capture over an open area
  kCorridor,  // co-linear positions, all cameras facing along the line
  kLoop,      // two laps around a ring, cameras facing along the walk
};

std::string_view ToString(SceneLayout layout);
SceneLayout ParseSceneLayout(std::string_view name);

struct SynthConfig {
  SceneLayout layout = SceneLayout::kGrid;
  std::size_t n_db = 60;
  std::size_t n_query = 20;
  std::size_t n_points = 1500;
  // Queries placed far from every database image and every point.
  std::size_t n_missing = 0;
  double pixel_noise = 0.0;  // std-dev of Gaussian observation noise, px
  // Distance between neighboring database cameras. Zero is allowed for the
  // corridor, which then stacks every camera at one spot.
  double spacing_m = 5.0;
  double min_depth_m = 3.0;
  double max_depth_m = 25.0;
  // Query offset from its anchor database image.
  double query_offset_m = 1.5;
  double query_yaw_deg = 8.0;
  CameraIntrinsics intrinsics{500.0, 500.0, 320.0, 240.0, 640, 480};
  std::uint64_t seed = 1;
};

struct SynthScene {
  SceneMap scene;  // every image (database and query) with its true pose
  std::vector<ImageId> database;
  std::vector<ImageId> queries;  // includes the missing ones
  std::vector<ImageId> missing;
  SynthConfig config;
};

// Database ids are 1..n_db, query ids follow. Every point is seen by at
// least two database images. Throws InvalidArgument when the counts are
// below the minimum or the layout cannot host the requested points.
SynthScene GenerateScene(const SynthConfig& config);

enum class DescriptorMode { kPoseOracle, kPosePlusNoise, kAdversarial };

std::string_view ToString(DescriptorMode mode);
DescriptorMode ParseDescriptorMode(std::string_view name);

struct DescriptorModel {
  DescriptorMode mode = DescriptorMode::kPoseOracle;
  std::size_t dimension = 64;
  double noise_sigma = 0.0;  // per component, before normalization
  double tau_c_m = 25.0;
  double tau_r_deg = 45.0;
  // Constant coordinate appended before normalization; keeps the norms of
  // the pose embeddings close so cosine similarity tracks pose distance.
  double anchor = 4.0;
};

// Unit-norm descriptors for every image in the scene, rounded to float32 so
// that they survive a save/load cycle unchanged.
DescriptorTable EmitDescriptors(const SynthScene& scene,
                                const DescriptorModel& model,
                                std::uint64_t seed);

struct MatchNoise {
  double inlier_noise_px = 0.0;  // added to the first image's pixel only
  double outlier_ratio = 0.0;    // share of outliers among emitted matches
  // Outliers emitted for pairs without shared points when outlier_ratio > 0.
  std::size_t min_outliers = 10;
};

// Pixel correspondences from points observed by both images of each pair,
// plus uniform outliers.
MatchStore EmitMatches(const SynthScene& scene, std::span<const ImagePair> pairs,
                       const MatchNoise& noise, std::uint64_t seed);

// Every query x database pair and every database pair, queries first.
std::vector<ImagePair> AllScenePairs(const SynthScene& scene);

struct ChallengeFixtures {
  std::map<ImageId, GrayImage> images;
  std::map<ImageId, LabelMask> masks;
  std::set<std::uint8_t> known_labels;
  std::set<std::uint8_t> dynamic_labels;
  std::set<ImageId> blurred;  // queries rendered with a strong blur
  std::set<ImageId> dynamic;  // queries with a large dynamic region
};

// Checkerboard texture images and label masks for every query; a share of
// them blurred or covered by a dynamic-object region.
ChallengeFixtures EmitChallengeFixtures(const SynthScene& scene, std::uint64_t seed,
                                        double blurred_share = 0.3,
                                        double dynamic_share = 0.3);

struct SynthDatasetConfig {
  SynthConfig scene;
  std::vector<std::pair<std::string, DescriptorModel>> features = {
      {"oracle", {DescriptorMode::kPoseOracle}},
      {"noisy", {DescriptorMode::kPosePlusNoise, 64, 0.02}},
      {"random", {DescriptorMode::kAdversarial}},
  };
  MatchNoise matches{0.5, 0.2, 10};
  bool challenge = true;
};

// Scene, descriptors, matches over AllScenePairs and, optionally, challenge
// fixtures, all derived from scene.seed.
Dataset BuildSyntheticDataset(const SynthDatasetConfig& config,
                              SynthScene* scene_out = nullptr);

}  // namespace vlbench
