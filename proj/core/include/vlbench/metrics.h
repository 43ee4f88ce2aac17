#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vlbench/gt_ranking.h"
#include "vlbench/localize.h"
#include "vlbench/types.h"

namespace vlbench {

struct AccuracyThreshold {
  double position_m = 0.0;
  double rotation_deg = 0.0;

  std::string Label() const;
};

// Ordered strictly increasing in both components.
struct AccuracyThresholds {
  std::vector<AccuracyThreshold> levels = {{0.25, 2.0}, {0.5, 5.0}, {5.0, 10.0}};

  void Validate() const;
};

// Percentage of queries with c_error < X and R_error < Y. Failed results,
// and results without an error, count as not localized. Throws on empty
// input.
double LocalizedPercentage(std::span<const LocalizationResult> results,
                           const AccuracyThreshold& threshold);

// |top-k ∩ relevant| / k; a ranking shorter than k still divides by k.
// `relevant` must be sorted.
double PrecisionAtK(std::span<const ImageId> ranking,
                    std::span<const ImageId> relevant, std::size_t k);

// Average precision of one ranked list against a sorted relevant set;
// std::nullopt when the relevant set is empty.
std::optional<double> AveragePrecision(std::span<const ImageId> ranking,
                                       std::span<const ImageId> relevant);

using RelevantSetMap = std::map<ImageId, std::vector<ImageId>>;

// Ranked database ids per query, dropping scores.
std::map<ImageId, std::vector<ImageId>> RankedIds(const Ranking& ranking);

struct RecallResult {
  double recall = 0.0;
  std::size_t eligible = 0;  // queries with at least one relevant image
};

// Fraction of eligible queries with a relevant image in their top k.
// Queries with an empty relevant set are excluded from the denominator.
// Throws InvalidArgument when no query is eligible.
RecallResult RecallAtK(const std::map<ImageId, std::vector<ImageId>>& rankings,
                       const RelevantSetMap& relevant, std::size_t k);

// Mean of per-query precision at k over queries that have relevant images.
double MeanPrecisionAtK(
    const std::map<ImageId, std::vector<ImageId>>& rankings,
    const RelevantSetMap& relevant, std::size_t k);

struct MapResult {
  double map = 0.0;
  std::vector<ImageId> skipped;  // queries without relevant images
};

MapResult MeanAveragePrecision(
    const std::map<ImageId, std::vector<ImageId>>& rankings,
    const RelevantSetMap& relevant);

}  // namespace vlbench
