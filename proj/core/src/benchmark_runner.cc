#include "vlbench/benchmark_runner.h"

#include <algorithm>
#include <exception>
#include <string>

#include "vlbench/random.h"
#include "vlbench/retrieval.h"

namespace vlbench {
namespace {

std::string GtSource(GtMethod method) { return "gt-" + std::string(ToString(method)); }

std::string MethodName(Paradigm paradigm, WeightingScheme scheme) {
  if (paradigm == Paradigm::kPoseApproximation) {
    return "p1-" + std::string(ToString(scheme));
  }
  return std::string(ToString(paradigm));
}

std::vector<ImageId> TopK(const Ranking& ranking, ImageId query, std::size_t k) {
  std::vector<ImageId> out;
  const auto it = ranking.find(query);
  if (it == ranking.end()) return out;
  const std::size_t n = std::min(k, it->second.size());
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(it->second[i].id);
  return out;
}

LocalizationResult ApproximatePose(const Dataset& ds, ImageId query,
                                   std::span<const ImageId> retrieved,
                                   WeightingScheme scheme,
                                   const DescriptorTable* descriptors,
                                   const CsiConfig& csi) {
  LocalizationResult r;
  r.query = query;
  if (retrieved.empty()) return r;  // nothing retrieved: no pose
  std::vector<Pose> poses;
  poses.reserve(retrieved.size());
  for (ImageId id : retrieved) poses.push_back(ds.scene.Image(id).pose);

  InterpolationWeights weights;
  if (scheme == WeightingScheme::kEqual) {
    weights = WeightsEqual(retrieved.size());
  } else {
    if (descriptors == nullptr) {
      throw InvalidArgument("weighting scheme needs descriptors");
    }
    const auto q = descriptors->find(query);
    if (q == descriptors->end()) {
      throw InvalidArgument("no descriptor for query " + std::to_string(query.value));
    }
    const Eigen::MatrixXd db = DescriptorColumns(retrieved, *descriptors);
    weights = scheme == WeightingScheme::kBarycentric
                  ? WeightsBarycentric(q->second, db)
                  : WeightsCosine(q->second, db, csi).weights;
  }
  r.estimated = InterpolatePose(poses, weights).pose;
  r.status = LocalizationStatus::kSuccess;
  return r;
}

SceneMap DatabaseOnlyMap(const Dataset& ds) {
  SceneMap map;
  const std::set<ImageId> db(ds.database.begin(), ds.database.end());
  for (ImageId id : ds.database) map.AddImage(id, ds.scene.Image(id));
  std::map<PointId, std::size_t> views;
  for (const Observation& o : ds.scene.Observations()) {
    if (db.contains(o.image)) ++views[o.point];
  }
  for (const auto& [point, n] : views) {
    if (n >= 2) map.AddPoint(point, ds.scene.Point(point));
  }
  for (const Observation& o : ds.scene.Observations()) {
    if (db.contains(o.image) && map.HasPoint(o.point)) map.AddObservation(o);
  }
  return map;
}

double LocalizedAmong(const std::vector<LocalizationResult>& results,
                      const std::set<ImageId>& subset, const AccuracyThreshold& t) {
  std::vector<LocalizationResult> picked;
  for (const LocalizationResult& r : results) {
    if (subset.contains(r.query)) picked.push_back(r);
  }
  return LocalizedPercentage(picked, t);
}

const Cell* FindCell(const std::vector<Cell>& cells, const std::string& source,
                     const std::string& method) {
  for (const Cell& c : cells) {
    if (c.source == source && c.method == method && !c.error) return &c;
  }
  return nullptr;
}

}  // namespace

std::string_view ToString(Paradigm paradigm) {
  switch (paradigm) {
    case Paradigm::kPoseApproximation: return "p1";
    case Paradigm::kLocalSfm: return "p2a";
    case Paradigm::kGlobalMap: return "p2b";
  }
  return "p1";
}

Paradigm ParseParadigm(std::string_view name) {
  if (name == "p1") return Paradigm::kPoseApproximation;
  if (name == "p2a") return Paradigm::kLocalSfm;
  if (name == "p2b") return Paradigm::kGlobalMap;
  throw InvalidArgument("unknown paradigm '" + std::string(name) +
                        "' (expected p1, p2a or p2b)");
}

void BenchmarkConfig::Validate() const {
  if (k_grid.empty()) throw InvalidArgument("k grid is empty");
  for (std::size_t i = 0; i < k_grid.size(); ++i) {
    if (k_grid[i] < 1 || k_grid[i] > 50) {
      throw InvalidArgument("k values must lie in [1, 50]");
    }
    if (i > 0 && k_grid[i] <= k_grid[i - 1]) {
      throw InvalidArgument("k grid must be strictly ascending");
    }
  }
  if (gt.max_rank < k_grid.back()) {
    throw InvalidArgument("GT ranking depth is below the largest k");
  }
  thresholds.Validate();
  if (!(dynamic_min_fraction >= 0.0 && dynamic_min_fraction <= 1.0)) {
    throw InvalidArgument("dynamic fraction threshold must lie in [0, 1]");
  }
}

std::uint64_t CellSeed(std::uint64_t master, const std::string& source,
                       const std::string& method, std::size_t k, ImageId query) {
  return DeriveSeed(master, {StableHash(source), StableHash(method), k, query.value});
}

std::map<GtMethod, GroundTruthRanking> BuildGtRankings(const Dataset& ds,
                                                       const BenchmarkConfig& config) {
  std::map<GtMethod, GroundTruthRanking> out;
  for (GtMethod m : config.gt_methods) {
    out.emplace(m, BuildGtRanking(m, ds.queries, ds.database, ds.scene, config.gt));
  }
  return out;
}

SceneMap BuildGlobalMap(const Dataset& ds, const BenchmarkConfig& config,
                        MapBuildStats* stats) {
  if (ds.HasMap()) {
    SceneMap map = DatabaseOnlyMap(ds);
    if (stats != nullptr) {
      *stats = {};
      stats->triangulated = map.Points().size();
    }
    return map;
  }
  const std::vector<ImagePair> pairs =
      SelectMapPairs(ds.database, ds.scene, config.map_pairs);
  return TriangulateTracks(pairs, ds.scene, ds.matches,
                           config.localize.triangulation, stats);
}

Cell RunCell(const Dataset& ds, const std::string& source, bool ground_truth,
             const Ranking& ranking, Paradigm paradigm, WeightingScheme scheme,
             const DescriptorTable* descriptors, const SceneMap* global_map,
             const BenchmarkConfig& config) {
  Cell cell;
  cell.source = source;
  cell.ground_truth = ground_truth;
  cell.paradigm = paradigm;
  cell.method = MethodName(paradigm, scheme);
  if (paradigm == Paradigm::kGlobalMap && global_map == nullptr) {
    throw InvalidArgument("global registration needs a map");
  }
  for (std::size_t k : config.k_grid) {
    std::vector<LocalizationResult>& results = cell.results[k];
    for (ImageId query : ds.queries) {
      const std::vector<ImageId> retrieved = TopK(ranking, query, k);
      const CameraIntrinsics& intr = ds.scene.Image(query).intrinsics;
      LocalizeConfig lc = config.localize;
      lc.ransac.seed = CellSeed(config.seed, source, cell.method, k, query);
      LocalizationResult r;
      switch (paradigm) {
        case Paradigm::kPoseApproximation:
          r = ApproximatePose(ds, query, retrieved, scheme, descriptors, config.csi);
          break;
        case Paradigm::kLocalSfm:
          r = LocalizeLocalSfm(query, intr, retrieved, ds.scene, ds.matches, lc);
          break;
        case Paradigm::kGlobalMap:
          r = LocalizeGlobal(query, intr, retrieved, *global_map, ds.matches, lc);
          break;
      }
      r.query = query;
      if (r.ok()) r.error = ComputePoseError(r.estimated, ds.scene.Image(query).pose);
      results.push_back(r);
    }
    std::vector<double>& loc = cell.localized[k];
    for (const AccuracyThreshold& t : config.thresholds.levels) {
      loc.push_back(LocalizedPercentage(results, t));
    }
  }
  return cell;
}

QueryConditions ComputeQueryConditions(const Dataset& ds, const BenchmarkConfig& config,
                                       std::vector<std::string>* failures) {
  QueryConditions out;
  for (ImageId q : ds.queries) {
    if (const auto it = ds.images.find(q); it != ds.images.end()) {
      try {
        out.blur.emplace(q, ComputeBlurScore(it->second, config.blur));
      } catch (const std::exception& e) {
        if (failures) failures->push_back("challenge/blur/" + std::to_string(q.value) + ": " + e.what());
      }
    }
    if (const auto it = ds.masks.find(q); it != ds.masks.end()) {
      try {
        out.dynamic.emplace(q, ComputeDynamicFraction(it->second, ds.dynamic_labels,
                                                      ds.known_labels,
                                                      config.dynamic_min_fraction));
      } catch (const std::exception& e) {
        if (failures) failures->push_back("challenge/dynamic/" + std::to_string(q.value) + ": " + e.what());
      }
    }
  }
  return out;
}

ReportBundle RunBenchmark(const Dataset& ds, const BenchmarkConfig& config) {
  config.Validate();
  ReportBundle bundle;
  bundle.config = config;
  const std::size_t max_k = config.k_grid.back();
  const auto& levels = config.thresholds.levels;

  if (config.features.empty()) {
    for (const auto& [name, table] : ds.descriptors) bundle.features.push_back(name);
  } else {
    for (const std::string& f : config.features) {
      if (ds.descriptors.contains(f)) {
        bundle.features.push_back(f);
      } else {
        bundle.failures.push_back("feature " + f + ": not in dataset");
      }
    }
  }

  for (const std::string& f : bundle.features) {
    try {
      bundle.rankings[f] = RankByDescriptors(ds.queries, ds.database, ds.descriptors.at(f), max_k);
    } catch (const std::exception& e) {
      bundle.failures.push_back("ranking/" + f + ": " + e.what());
    }
  }
  std::vector<GtMethod> gt_available;
  for (GtMethod m : config.gt_methods) {
    const std::string name = GtSource(m);
    try {
      if (m == GtMethod::kCoObservation && !ds.HasMap()) {
        throw InvalidArgument("co-observation ranking needs a map");
      }
      GroundTruthRanking gt = BuildGtRanking(m, ds.queries, ds.database, ds.scene, config.gt);
      bundle.gt_statistics[m] = ComputeGtStatistics(gt.ranking, config.gt.max_rank);
      bundle.rankings[name] = std::move(gt.ranking);
      gt_available.push_back(m);
    } catch (const std::exception& e) {
      bundle.failures.push_back("ranking/" + name + ": " + e.what());
    }
  }

  const bool wants_global = std::find(config.paradigms.begin(), config.paradigms.end(),
                                      Paradigm::kGlobalMap) != config.paradigms.end();
  std::optional<SceneMap> global_map;
  if (wants_global) {
    try {
      global_map = BuildGlobalMap(ds, config, &bundle.global_map);
    } catch (const std::exception& e) {
      bundle.failures.push_back("global-map: " + std::string(e.what()));
    }
  }

  // Cells: descriptor sources first, then GT sources.
  std::vector<std::pair<std::string, bool>> sources;
  for (const std::string& f : bundle.features) {
    if (bundle.rankings.contains(f)) sources.emplace_back(f, false);
  }
  for (GtMethod m : gt_available) sources.emplace_back(GtSource(m), true);

  for (const auto& [source, is_gt] : sources) {
    const Ranking& ranking = bundle.rankings.at(source);
    const DescriptorTable* descriptors = is_gt ? nullptr : &ds.descriptors.at(source);
    for (Paradigm p : config.paradigms) {
      std::vector<WeightingScheme> schemes = {WeightingScheme::kEqual};
      if (p == Paradigm::kPoseApproximation && !is_gt) schemes = config.schemes;
      for (WeightingScheme s : schemes) {
        const std::string method = MethodName(p, s);
        try {
          if (p == Paradigm::kGlobalMap && !global_map) {
            throw InvalidArgument("no global map available");
          }
          bundle.cells.push_back(RunCell(ds, source, is_gt, ranking, p, s, descriptors,
                                         global_map ? &*global_map : nullptr, config));
        } catch (const std::exception& e) {
          Cell failed;
          failed.source = source;
          failed.ground_truth = is_gt;
          failed.paradigm = p;
          failed.method = method;
          failed.error = e.what();
          bundle.cells.push_back(std::move(failed));
          bundle.failures.push_back(source + "/" + method + ": " + e.what());
        }
      }
    }
  }

  // Retrieval metrics per feature under every relevance definition.
  for (GtMethod m : gt_available) {
    std::map<ImageId, std::vector<ImageId>> relevant;
    try {
      relevant = RelevantSets(m, ds.queries, ds.database, ds.scene, config.gt);
    } catch (const std::exception& e) {
      bundle.failures.push_back("relevance/" + std::string(ToString(m)) + ": " + e.what());
      continue;
    }
    for (const std::string& f : bundle.features) {
      if (!bundle.rankings.contains(f)) continue;
      const auto ranked = RankedIds(bundle.rankings.at(f));
      RetrievalSeries series;
      series.feature = f;
      series.relevance = m;
      try {
        for (std::size_t k : config.k_grid) {
          series.precision[k] = MeanPrecisionAtK(ranked, relevant, k);
          series.recall[k] = RecallAtK(ranked, relevant, k).recall;
          for (const auto& [q, ids] : ranked) {
            const auto rel = relevant.find(q);
            if (rel == relevant.end() || rel->second.empty()) continue;
            series.precision_per_query[q][k] = PrecisionAtK(ids, rel->second, k);
          }
        }
        const MapResult map = MeanAveragePrecision(ranked, relevant);
        series.mean_ap = map.map;
        series.map_skipped = map.skipped.size();
      } catch (const std::exception& e) {
        bundle.failures.push_back("metrics/" + f + "/" + std::string(ToString(m)) + ": " +
                                  e.what());
        continue;
      }
      bundle.retrieval.push_back(std::move(series));
    }
  }

  // Correlations between retrieval metrics and localization.
  std::vector<std::string> methods;
  for (const Cell& c : bundle.cells) {
    if (!c.ground_truth && std::find(methods.begin(), methods.end(), c.method) == methods.end()) {
      methods.push_back(c.method);
    }
  }
  for (const std::string& method : methods) {
    for (GtMethod m : gt_available) {
      std::map<std::string, KSeries> precision;
      std::map<std::string, KSeries> recall;
      std::map<std::string, std::map<ImageId, KSeries>> precision_q;
      for (const RetrievalSeries& s : bundle.retrieval) {
        if (s.relevance != m || !FindCell(bundle.cells, s.feature, method)) continue;
        precision[s.feature] = s.precision;
        recall[s.feature] = s.recall;
        precision_q[s.feature] = s.precision_per_query;
      }
      if (precision.empty()) continue;
      for (std::size_t t = 0; t < levels.size(); ++t) {
        std::map<std::string, KSeries> localized;
        for (const auto& [feature, series] : precision) {
          const Cell* cell = FindCell(bundle.cells, feature, method);
          for (const auto& [k, values] : cell->localized) localized[feature][k] = values[t];
        }
        bundle.dataset_correlations.push_back(
            {method, levels[t].Label(), m, "precision",
             CorrelatePerDataset(precision, localized, config.k_grid)});
        bundle.dataset_correlations.push_back(
            {method, levels[t].Label(), m, "recall",
             CorrelatePerDataset(recall, localized, config.k_grid)});
      }
      // Per query: P@k against position error, successful k only.
      std::map<std::string, std::map<ImageId, KSeries>> error_q;
      for (const auto& [feature, unused] : precision_q) {
        const Cell* cell = FindCell(bundle.cells, feature, method);
        for (const auto& [k, results] : cell->results) {
          for (const LocalizationResult& r : results) {
            if (r.ok() && r.error) error_q[feature][r.query][k] = r.error->position_m;
          }
        }
      }
      bundle.query_correlations.push_back(
          {method, m, CorrelatePerQuery(precision_q, error_q, config.k_grid)});
    }
  }

  // Upper-bound gap: GT ranking against descriptor ranking, same method
  // (pose approximation on GT rankings always uses equal weights).
  for (const Cell& cell : bundle.cells) {
    if (cell.ground_truth || cell.error) continue;
    for (GtMethod m : gt_available) {
      const std::string gt_method = cell.paradigm == Paradigm::kPoseApproximation
                                        ? MethodName(cell.paradigm, WeightingScheme::kEqual)
                                        : cell.method;
      const Cell* gt = FindCell(bundle.cells, GtSource(m), gt_method);
      if (gt == nullptr) continue;
      for (const auto& [k, values] : cell.localized) {
        for (std::size_t t = 0; t < levels.size(); ++t) {
          bundle.gaps.push_back({cell.method, m, cell.source, k, levels[t].Label(),
                                 gt->localized.at(k)[t], values[t]});
        }
      }
    }
  }

  // Challenge subsets.
  bundle.conditions = ComputeQueryConditions(ds, config, &bundle.failures);
  std::vector<std::pair<std::string, std::set<ImageId>>> subsets(4);
  subsets[0].first = "blurry";
  subsets[1].first = "sharp";
  subsets[2].first = "dynamic";
  subsets[3].first = "static";
  for (const auto& [q, b] : bundle.conditions.blur) subsets[b.blurry ? 0 : 1].second.insert(q);
  for (const auto& [q, d] : bundle.conditions.dynamic) subsets[d.dynamic ? 2 : 3].second.insert(q);
  for (const Cell& cell : bundle.cells) {
    if (cell.error) continue;
    for (const auto& [name, subset] : subsets) {
      if (subset.empty()) continue;
      for (const auto& [k, results] : cell.results) {
        for (std::size_t t = 0; t < levels.size(); ++t) {
          bundle.challenge.push_back({name, cell.source, cell.method, k, levels[t].Label(),
                                      subset.size(), LocalizedAmong(results, subset, levels[t]),
                                      cell.localized.at(k)[t]});
        }
      }
    }
  }
  return bundle;
}

}  // namespace vlbench
