#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vlbench/challenge.h"
#include "vlbench/correlation.h"
#include "vlbench/data_io.h"
#include "vlbench/gt_ranking.h"
#include "vlbench/localize.h"
#include "vlbench/metrics.h"
#include "vlbench/pose_approx.h"

namespace vlbench {

enum class Paradigm {
  kPoseApproximation,  // retrieved poses interpolated, no geometry
  kLocalSfm,           // map triangulated from the retrieved images
  kGlobalMap,          // registration against a pre-built map
};

std::string_view ToString(Paradigm paradigm);
Paradigm ParseParadigm(std::string_view name);  // "p1", "p2a", "p2b"

struct BenchmarkConfig {
  std::vector<std::size_t> k_grid = {1, 2, 3, 4, 5, 10, 20, 50};
  std::vector<Paradigm> paradigms = {Paradigm::kPoseApproximation,
                                     Paradigm::kLocalSfm, Paradigm::kGlobalMap};
  std::vector<WeightingScheme> schemes = {WeightingScheme::kEqual,
                                          WeightingScheme::kBarycentric,
                                          WeightingScheme::kCosine};
  // Ground-truth rankings evaluated as upper bounds, and relevance
  // definitions for the retrieval metrics.
  std::vector<GtMethod> gt_methods = {GtMethod::kRelativePose, GtMethod::kFrustum,
                                      GtMethod::kCoObservation};
  // Descriptor features to evaluate; empty means every feature of the dataset.
  std::vector<std::string> features;
  GtConfig gt;
  CsiConfig csi;
  AccuracyThresholds thresholds;
  LocalizeConfig localize;
  PairSelection map_pairs;
  BlurConfig blur;
  double dynamic_min_fraction = 0.20;
  std::uint64_t seed = 1;

  // Throws InvalidArgument unless the k grid is non-empty, strictly
  // ascending, within [1, 50], and the thresholds are ordered.
  void Validate() const;
};

// One ranking source (a descriptor feature or a GT method) localized with
// one method (paradigm plus, for pose approximation, weighting scheme).
struct Cell {
  std::string source;  // feature name, or "gt-<method>"
  bool ground_truth = false;
  Paradigm paradigm = Paradigm::kPoseApproximation;
  std::string method;  // "p1-ewb", "p1-bdi", "p1-csi", "p2a", "p2b"
  std::map<std::size_t, std::vector<LocalizationResult>> results;  // per k
  // localized % per k, one entry per accuracy threshold
  std::map<std::size_t, std::vector<double>> localized;
  std::optional<std::string> error;
};

struct RetrievalSeries {
  std::string feature;
  GtMethod relevance = GtMethod::kRelativePose;
  KSeries precision;  // mean P@k over queries with a relevant image
  KSeries recall;
  std::optional<double> mean_ap;
  std::size_t map_skipped = 0;
  std::map<ImageId, KSeries> precision_per_query;
};

struct DatasetCorrelation {
  std::string method;
  std::string threshold;
  GtMethod relevance = GtMethod::kRelativePose;
  std::string metric;  // "precision" or "recall"
  PerDatasetCorrelation result;
};

struct QueryCorrelation {
  std::string method;
  GtMethod relevance = GtMethod::kRelativePose;
  PerQueryCorrelation result;
};

struct GapRow {
  std::string method;
  GtMethod gt = GtMethod::kRelativePose;
  std::string feature;
  std::size_t k = 0;
  std::string threshold;
  double gt_value = 0.0;
  double feature_value = 0.0;
};

struct ChallengeRow {
  std::string subset;  // "blurry", "sharp", "dynamic", "static"
  std::string source;
  std::string method;
  std::size_t k = 0;
  std::string threshold;
  std::size_t subset_size = 0;
  double subset_value = 0.0;
  double all_value = 0.0;
};

struct QueryConditions {
  std::map<ImageId, BlurScore> blur;
  std::map<ImageId, DynamicFraction> dynamic;
};

struct ReportBundle {
  BenchmarkConfig config;
  std::vector<std::string> features;
  std::map<std::string, Ranking> rankings;  // per source
  std::map<GtMethod, GtStatistics> gt_statistics;
  std::vector<Cell> cells;
  std::vector<RetrievalSeries> retrieval;
  std::vector<DatasetCorrelation> dataset_correlations;
  std::vector<QueryCorrelation> query_correlations;
  std::vector<GapRow> gaps;
  QueryConditions conditions;
  std::vector<ChallengeRow> challenge;
  MapBuildStats global_map;
  // "<stage or cell>: <message>" for every part that could not be computed.
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
};

// Seed for RANSAC in one (source, method, k, query) evaluation.
std::uint64_t CellSeed(std::uint64_t master, const std::string& source,
                       const std::string& method, std::size_t k, ImageId query);

// GT rankings per configured method, with relevance flags.
std::map<GtMethod, GroundTruthRanking> BuildGtRankings(const Dataset& dataset,
                                                       const BenchmarkConfig& config);

// Map used for global registration: the dataset's own points restricted to
// database observations when present, otherwise triangulated from the
// frustum-selected database pairs.
SceneMap BuildGlobalMap(const Dataset& dataset, const BenchmarkConfig& config,
                        MapBuildStats* stats = nullptr);

// Localizes every query of `ranking` for each k. `global_map` is needed for
// kGlobalMap only; `descriptors` for the BDI and CSI schemes only.
Cell RunCell(const Dataset& dataset, const std::string& source, bool ground_truth,
             const Ranking& ranking, Paradigm paradigm, WeightingScheme scheme,
             const DescriptorTable* descriptors, const SceneMap* global_map,
             const BenchmarkConfig& config);

QueryConditions ComputeQueryConditions(const Dataset& dataset,
                                       const BenchmarkConfig& config,
                                       std::vector<std::string>* failures = nullptr);

// Every cell, metric, correlation, gap and challenge table. Failures are
// recorded per cell and stage; the run continues past them.
ReportBundle RunBenchmark(const Dataset& dataset, const BenchmarkConfig& config);

}  // namespace vlbench
