#include "vlbench/localize.h"

#include <algorithm>
#include <numeric>
#include <set>
#include <tuple>

#include "vlbench/gt_ranking.h"

namespace vlbench {

void MatchStore::Add(ImageId a, const Eigen::Vector2d& pixel_a, ImageId b,
                     const Eigen::Vector2d& pixel_b) {
  if (a == b) throw InvalidArgument("cannot match an image with itself");
  if (a < b) {
    pairs_[{a, b}].push_back({pixel_a, pixel_b});
  } else {
    pairs_[{b, a}].push_back({pixel_b, pixel_a});
  }
}

std::vector<PixelMatch> MatchStore::Between(ImageId from, ImageId to) const {
  const bool ordered = from < to;
  const auto it = pairs_.find(ordered ? ImagePair{from, to} : ImagePair{to, from});
  if (it == pairs_.end()) return {};
  if (ordered) return it->second;
  std::vector<PixelMatch> flipped;
  flipped.reserve(it->second.size());
  for (const PixelMatch& m : it->second) flipped.push_back({m.second, m.first});
  return flipped;
}

bool MatchStore::Contains(ImageId a, ImageId b) const {
  return pairs_.contains(a < b ? ImagePair{a, b} : ImagePair{b, a});
}

std::size_t MatchStore::size() const {
  std::size_t n = 0;
  for (const auto& [pair, list] : pairs_) n += list.size();
  return n;
}

std::string_view ToString(LocalizationStatus status) {
  switch (status) {
    case LocalizationStatus::kSuccess:
      return "success";
    case LocalizationStatus::kInsufficientMatches:
      return "insufficient-matches";
    case LocalizationStatus::kNoConsensus:
      return "no-consensus";
    case LocalizationStatus::kTooFewTracks:
      return "too-few-tracks";
    case LocalizationStatus::kRegistrationFailed:
      return "registration-failed";
  }
  return "unknown";
}

std::vector<Correspondence2D3D> LiftMatches(ImageId query,
                                            std::span<const ImageId> retrieved,
                                            const SceneMap& map,
                                            const MatchStore& matches,
                                            double lift_radius_px) {
  std::vector<Correspondence2D3D> lifted;
  std::set<std::tuple<double, double, PointId>> seen;
  std::set<ImageId> visited;
  for (ImageId db : retrieved) {
    if (db == query || !visited.insert(db).second) continue;
    if (!map.HasImage(db)) continue;
    for (const PixelMatch& m : matches.Between(query, db)) {
      const auto point = map.FindObservation(db, m.second, lift_radius_px);
      if (!point) continue;
      if (!seen.emplace(m.first.x(), m.first.y(), *point).second) continue;
      lifted.push_back({m.first, map.Point(*point)});
    }
  }
  return lifted;
}

LocalizationResult LocalizeGlobal(ImageId query,
                                  const CameraIntrinsics& query_intrinsics,
                                  std::span<const ImageId> retrieved,
                                  const SceneMap& map,
                                  const MatchStore& matches,
                                  const LocalizeConfig& config) {
  LocalizationResult result;
  result.query = query;
  const std::vector<Correspondence2D3D> lifted =
      LiftMatches(query, retrieved, map, matches, config.lift_radius_px);
  const PnpResult pnp =
      EstimatePosePnP(lifted, query_intrinsics, config.ransac);
  result.num_inliers = pnp.inliers.size();
  switch (pnp.status) {
    case PnpStatus::kSuccess:
      result.status = LocalizationStatus::kSuccess;
      result.estimated = pnp.pose;
      break;
    case PnpStatus::kInsufficientMatches:
      result.status = LocalizationStatus::kInsufficientMatches;
      break;
    case PnpStatus::kNoConsensus:
      result.status = LocalizationStatus::kNoConsensus;
      break;
  }
  return result;
}

namespace {

class TrackBuilder {
 public:
  std::size_t Node(ImageId image, const Eigen::Vector2d& pixel) {
    const auto key = std::make_tuple(image, pixel.x(), pixel.y());
    const auto [it, inserted] = index_.try_emplace(key, parent_.size());
    if (inserted) {
      parent_.push_back(parent_.size());
      images_.push_back({image});
      nodes_.push_back({image, pixel});
    }
    return it->second;
  }

  // False when the two tracks both contain an image (with different pixels).
  bool Link(std::size_t a, std::size_t b) {
    std::size_t ra = Find(a);
    std::size_t rb = Find(b);
    if (ra == rb) return true;
    const auto& ia = images_[ra];
    const auto& ib = images_[rb];
    std::vector<ImageId> common;
    std::set_intersection(ia.begin(), ia.end(), ib.begin(), ib.end(),
                          std::back_inserter(common));
    if (!common.empty()) return false;
    if (ia.size() < ib.size()) std::swap(ra, rb);
    std::vector<ImageId> merged;
    std::merge(images_[ra].begin(), images_[ra].end(), images_[rb].begin(),
               images_[rb].end(), std::back_inserter(merged));
    images_[ra] = std::move(merged);
    images_[rb].clear();
    parent_[rb] = ra;
    return true;
  }

  // Tracks with at least two nodes, each in node-creation order.
  std::vector<std::vector<std::size_t>> Tracks() {
    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < parent_.size(); ++i) groups[Find(i)].push_back(i);
    std::vector<std::pair<std::size_t, std::vector<std::size_t>>> ordered(
        groups.begin(), groups.end());
    std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
      return a.second.front() < b.second.front();
    });
    std::vector<std::vector<std::size_t>> tracks;
    for (auto& [root, members] : ordered) {
      if (members.size() >= 2) tracks.push_back(std::move(members));
    }
    return tracks;
  }

  const std::pair<ImageId, Eigen::Vector2d>& node(std::size_t i) const {
    return nodes_[i];
  }

 private:
  std::size_t Find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }

  std::map<std::tuple<ImageId, double, double>, std::size_t> index_;
  std::vector<std::size_t> parent_;
  std::vector<std::vector<ImageId>> images_;
  std::vector<std::pair<ImageId, Eigen::Vector2d>> nodes_;
};

}  // namespace

SceneMap TriangulateTracks(std::span<const ImagePair> pairs,
                           const SceneMap& posed, const MatchStore& matches,
                           const TriangulationConfig& config,
                           MapBuildStats* stats) {
  MapBuildStats local_stats;
  SceneMap map;
  TrackBuilder builder;
  for (const auto& [a, b] : pairs) {
    if (!map.HasImage(a)) map.AddImage(a, posed.Image(a));
    if (!map.HasImage(b)) map.AddImage(b, posed.Image(b));
    for (const PixelMatch& m : matches.Between(a, b)) {
      const std::size_t na = builder.Node(a, m.first);
      const std::size_t nb = builder.Node(b, m.second);
      if (!builder.Link(na, nb)) ++local_stats.inconsistent_splits;
    }
  }

  std::uint64_t next_point = 0;
  std::vector<ViewObservation> views;
  for (const std::vector<std::size_t>& track : builder.Tracks()) {
    ++local_stats.tracks;
    views.clear();
    for (std::size_t n : track) {
      const auto& [image, pixel] = builder.node(n);
      const ImageRecord& record = map.Image(image);
      views.push_back({record.pose, record.intrinsics, pixel});
    }
    const TriangulationResult tri = TriangulateMultiView(views, config);
    if (!tri.ok()) {
      ++local_stats.degenerate;
      continue;
    }
    const PointId id(next_point++);
    map.AddPoint(id, tri.point);
    for (std::size_t n : track) {
      const auto& [image, pixel] = builder.node(n);
      map.AddObservation({image, id, pixel});
    }
    ++local_stats.triangulated;
  }
  if (stats != nullptr) *stats = local_stats;
  return map;
}

LocalizationResult LocalizeLocalSfm(ImageId query,
                                    const CameraIntrinsics& query_intrinsics,
                                    std::span<const ImageId> retrieved,
                                    const SceneMap& posed,
                                    const MatchStore& matches,
                                    const LocalizeConfig& config,
                                    MapBuildStats* stats) {
  std::vector<ImageId> images;
  for (ImageId id : retrieved) {
    if (id != query &&
        std::find(images.begin(), images.end(), id) == images.end()) {
      images.push_back(id);
    }
  }

  LocalizationResult result;
  result.query = query;
  std::vector<ImagePair> pairs;
  for (std::size_t i = 0; i < images.size(); ++i) {
    for (std::size_t j = i + 1; j < images.size(); ++j) {
      pairs.emplace_back(std::min(images[i], images[j]),
                         std::max(images[i], images[j]));
    }
  }
  std::sort(pairs.begin(), pairs.end());

  MapBuildStats build_stats;
  const SceneMap local =
      TriangulateTracks(pairs, posed, matches, config.triangulation, &build_stats);
  if (stats != nullptr) *stats = build_stats;

  const std::size_t needed = std::max<std::size_t>(4, config.ransac.min_inliers);
  if (local.Points().size() < needed) {
    result.status = LocalizationStatus::kTooFewTracks;
    return result;
  }

  LocalizationResult registered =
      LocalizeGlobal(query, query_intrinsics, images, local, matches, config);
  if (!registered.ok()) {
    registered.status = LocalizationStatus::kRegistrationFailed;
  }
  return registered;
}

std::vector<ImagePair> SelectMapPairs(std::span<const ImageId> images,
                                      const SceneMap& posed,
                                      const PairSelection& selection) {
  std::vector<ImageId> ids(images.begin(), images.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  std::vector<Frustum> frusta;
  frusta.reserve(ids.size());
  for (ImageId id : ids) {
    const ImageRecord& r = posed.Image(id);
    frusta.push_back(BuildFrustum(r.pose, r.intrinsics, selection.frustum_near_m,
                                  selection.frustum_far_m));
  }

  const std::size_t n = ids.size();
  std::vector<double> overlap(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = FrustumOverlapScore(frusta[i], frusta[j]);
      overlap[i * n + j] = s;
      overlap[j * n + i] = s;
    }
  }

  std::set<ImagePair> selected;
  if (selection.mode == PairSelection::Mode::kThreshold) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (overlap[i * n + j] >= selection.min_radius_m) {
          selected.emplace(ids[i], ids[j]);
        }
      }
    }
  } else {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) {
                         return overlap[i * n + a] > overlap[i * n + b];
                       });
      std::size_t taken = 0;
      for (std::size_t j : order) {
        if (taken >= selection.top_n) break;
        if (j == i || overlap[i * n + j] <= 0.0) continue;
        selected.emplace(std::min(ids[i], ids[j]), std::max(ids[i], ids[j]));
        ++taken;
      }
    }
  }
  return {selected.begin(), selected.end()};
}

}  // namespace vlbench
