#include "vlbench/gt_ranking.h"

#include <algorithm>
#include <iterator>
#include <optional>
#include <string>

namespace vlbench {

std::string_view ToString(GtMethod method) {
  switch (method) {
    case GtMethod::kRelativePose:
      return "rcp";
    case GtMethod::kFrustum:
      return "frustum";
    case GtMethod::kCoObservation:
      return "coobs";
  }
  return "unknown";
}

GtMethod ParseGtMethod(std::string_view name) {
  if (name == "rcp") return GtMethod::kRelativePose;
  if (name == "frustum") return GtMethod::kFrustum;
  if (name == "coobs") return GtMethod::kCoObservation;
  throw InvalidArgument("unknown ground-truth method '" + std::string(name) +
                        "' (expected rcp, frustum or coobs)");
}

double RcpScore(const Pose& query, const Pose& target,
                const RcpConfig& config) {
  return PositionError(query, target) / config.tau_c_m +
         RotationError(query, target) / config.tau_r_deg;
}

double FrustumOverlapScore(const Frustum& query, const Frustum& target) {
  std::vector<HalfSpace> planes;
  planes.reserve(query.half_spaces.size() + target.half_spaces.size());
  planes.insert(planes.end(), query.half_spaces.begin(),
                query.half_spaces.end());
  planes.insert(planes.end(), target.half_spaces.begin(),
                target.half_spaces.end());
  const ChebyshevBall ball = ChebyshevCenter(planes);
  switch (ball.status) {
    case ChebyshevStatus::kOptimal:
      return ball.radius;
    case ChebyshevStatus::kEmpty:
      return 0.0;
    case ChebyshevStatus::kUnbounded:
      throw SolverError("frustum intersection is unbounded");
    case ChebyshevStatus::kIterationLimit:
      throw SolverError("Chebyshev LP hit its iteration limit");
  }
  return 0.0;
}

std::size_t CoObservationScore(ImageId query, ImageId target,
                               const SceneMap& map) {
  const std::vector<PointId> a = map.PointsSeenBy(query);
  const std::vector<PointId> b = map.PointsSeenBy(target);
  std::size_t shared = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++shared;
      ++ia;
      ++ib;
    }
  }
  return shared;
}

bool IsRelevant(GtMethod method, double score) {
  switch (method) {
    case GtMethod::kFrustum:
      return score > 0.0;
    case GtMethod::kCoObservation:
      return score >= 1.0;
    case GtMethod::kRelativePose:
      break;
  }
  throw InvalidArgument("relative-pose relevance needs pose errors");
}

bool IsRelevantRelativePose(const Pose& query, const Pose& target,
                            const GtConfig& config) {
  return PositionError(query, target) <= config.relevant_position_m &&
         RotationError(query, target) <= config.relevant_rotation_deg;
}

namespace {

struct Scored {
  ImageId id;
  double score;
  bool relevant;
};

// Scores every database image against one query. Entries that are not
// relevant by definition (zero overlap, zero co-observations) are dropped
// for the gain-type methods.
class QueryScorer {
 public:
  QueryScorer(GtMethod method, std::span<const ImageId> database,
              const SceneMap& scene, const GtConfig& config)
      : method_(method), database_(database), scene_(scene), config_(config) {
    if (method_ == GtMethod::kFrustum) {
      frusta_.reserve(database.size());
      for (ImageId id : database) frusta_.push_back(FrustumOf(id));
    }
    if (method_ == GtMethod::kCoObservation && scene.Observations().empty()) {
      throw InvalidArgument(
          "co-observation ground truth requires a map with observations");
    }
  }

  std::vector<Scored> Score(ImageId query) const {
    std::vector<Scored> scored;
    scored.reserve(database_.size());
    const ImageRecord& q = scene_.Image(query);
    std::optional<Frustum> query_frustum;
    if (method_ == GtMethod::kFrustum) query_frustum = FrustumOf(query);

    for (std::size_t i = 0; i < database_.size(); ++i) {
      const ImageId id = database_[i];
      switch (method_) {
        case GtMethod::kRelativePose: {
          const Pose& t = scene_.Image(id).pose;
          scored.push_back({id, RcpScore(q.pose, t, config_.rcp),
                            IsRelevantRelativePose(q.pose, t, config_)});
          break;
        }
        case GtMethod::kFrustum: {
          const double s = FrustumOverlapScore(*query_frustum, frusta_[i]);
          if (s > 0.0) scored.push_back({id, s, true});
          break;
        }
        case GtMethod::kCoObservation: {
          const auto s = CoObservationScore(query, id, scene_);
          if (s >= 1) scored.push_back({id, static_cast<double>(s), true});
          break;
        }
      }
    }
    return scored;
  }

 private:
  Frustum FrustumOf(ImageId id) const {
    const ImageRecord& r = scene_.Image(id);
    return BuildFrustum(r.pose, r.intrinsics, config_.frustum_near_m,
                        config_.frustum_far_m);
  }

  GtMethod method_;
  std::span<const ImageId> database_;
  const SceneMap& scene_;
  const GtConfig& config_;
  std::vector<Frustum> frusta_;
};

}  // namespace

GroundTruthRanking BuildGtRanking(GtMethod method,
                                  std::span<const ImageId> queries,
                                  std::span<const ImageId> database,
                                  const SceneMap& scene,
                                  const GtConfig& config) {
  const QueryScorer scorer(method, database, scene, config);
  const bool ascending = method == GtMethod::kRelativePose;

  GroundTruthRanking out;
  out.method = method;
  for (ImageId query : queries) {
    std::vector<Scored> scored = scorer.Score(query);
    std::sort(scored.begin(), scored.end(),
              [ascending](const Scored& a, const Scored& b) {
                if (a.score != b.score) {
                  return ascending ? a.score < b.score : a.score > b.score;
                }
                return a.id < b.id;
              });
    if (scored.size() > config.max_rank) scored.resize(config.max_rank);
    auto& list = out.ranking[query];
    list.reserve(scored.size());
    for (const Scored& s : scored) list.push_back({s.id, s.score, s.relevant});
  }
  return out;
}

std::map<ImageId, std::vector<ImageId>> RelevantSets(
    GtMethod method, std::span<const ImageId> queries,
    std::span<const ImageId> database, const SceneMap& scene,
    const GtConfig& config) {
  const QueryScorer scorer(method, database, scene, config);
  std::map<ImageId, std::vector<ImageId>> sets;
  for (ImageId query : queries) {
    auto& set = sets[query];
    for (const Scored& s : scorer.Score(query)) {
      if (s.relevant) set.push_back(s.id);
    }
    std::sort(set.begin(), set.end());
  }
  return sets;
}

GtStatistics ComputeGtStatistics(const Ranking& ranking, std::size_t cap) {
  if (ranking.empty()) {
    throw InvalidArgument("ground-truth statistics need at least one query");
  }
  std::size_t total = 0;
  std::size_t missing = 0;
  for (const auto& [query, list] : ranking) {
    const auto relevant = static_cast<std::size_t>(
        std::count_if(list.begin(), list.end(),
                      [](const RankedImage& r) { return r.relevant; }));
    total += std::min(relevant, cap);
    if (relevant == 0) ++missing;
  }
  const auto n = static_cast<double>(ranking.size());
  return {static_cast<double>(total) / n,
          100.0 * static_cast<double>(missing) / n};
}

}  // namespace vlbench
