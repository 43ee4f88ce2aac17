#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vlbench/chebyshev.h"
#include "vlbench/geometry.h"
#include "vlbench/scene_map.h"
#include "vlbench/types.h"

namespace vlbench {

// Ground-truth relevance definitions between a query and a database image.
enum class GtMethod {
  kRelativePose,   // cost c_diff / tau_c + R_diff / tau_R, lower is better
  kFrustum,        // radius of the largest ball in both frusta, higher is better
  kCoObservation,  // number of shared map points, higher is better
};

std::string_view ToString(GtMethod method);
// Accepts "rcp", "frustum" and "coobs". Throws InvalidArgument otherwise.
GtMethod ParseGtMethod(std::string_view name);

struct RcpConfig {
  double tau_c_m = 25.0;
  double tau_r_deg = 45.0;
};

struct GtConfig {
  RcpConfig rcp;
  // Binary relevance for the relative-pose definition.
  double relevant_position_m = 25.0;
  double relevant_rotation_deg = 45.0;
  double frustum_near_m = 0.0;
  double frustum_far_m = 25.0;
  std::size_t max_rank = 50;
};

struct RankedImage {
  ImageId id;
  double score = 0.0;
  bool relevant = false;
};

// Per query, database images in rank order.
using Ranking = std::map<ImageId, std::vector<RankedImage>>;

struct GroundTruthRanking {
  GtMethod method = GtMethod::kRelativePose;
  Ranking ranking;
};

double RcpScore(const Pose& query, const Pose& target,
                const RcpConfig& config = {});

// Inscribed-ball radius of the intersection of two frusta; 0 when they do not
// overlap with non-empty interior. Throws SolverError if the LP fails.
double FrustumOverlapScore(const Frustum& query, const Frustum& target);

// Number of map points observed by both images. Throws InvalidArgument for
// unknown ids.
std::size_t CoObservationScore(ImageId query, ImageId target,
                               const SceneMap& map);

// True when the score is counted as relevant under the method's binary rule.
// The relative-pose rule needs the underlying pose errors, not the score.
bool IsRelevant(GtMethod method, double score);
bool IsRelevantRelativePose(const Pose& query, const Pose& target,
                            const GtConfig& config);

// Ranks `database` for every query, truncated to config.max_rank. Images with
// zero frustum overlap or zero co-observations are left out. Ties are broken
// by ascending database id. `scene` supplies poses and intrinsics for every
// id, and observations for kCoObservation.
GroundTruthRanking BuildGtRanking(GtMethod method,
                                  std::span<const ImageId> queries,
                                  std::span<const ImageId> database,
                                  const SceneMap& scene,
                                  const GtConfig& config = {});

// All relevant database images per query, without truncation; used as the
// binary relevance for retrieval metrics.
std::map<ImageId, std::vector<ImageId>> RelevantSets(
    GtMethod method, std::span<const ImageId> queries,
    std::span<const ImageId> database, const SceneMap& scene,
    const GtConfig& config = {});

struct GtStatistics {
  double avg_k = 0.0;
  double missing_pct = 0.0;
};

// avg_k counts entries flagged relevant per query (capped at `cap`);
// missing_pct is the share of queries with none. Throws on empty input.
GtStatistics ComputeGtStatistics(const Ranking& ranking, std::size_t cap = 50);

}  // namespace vlbench
