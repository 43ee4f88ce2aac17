#include "vlbench/metrics.h"

#include <algorithm>
#include <sstream>

namespace vlbench {
namespace {

bool Contains(std::span<const ImageId> sorted, ImageId id) {
  return std::binary_search(sorted.begin(), sorted.end(), id);
}

std::span<const ImageId> RelevantFor(const RelevantSetMap& relevant,
                                     ImageId query) {
  const auto it = relevant.find(query);
  if (it == relevant.end()) return {};
  return it->second;
}

}  // namespace

std::string AccuracyThreshold::Label() const {
  std::ostringstream out;
  out << position_m << "m_" << rotation_deg << "deg";
  return out.str();
}

void AccuracyThresholds::Validate() const {
  if (levels.empty()) throw InvalidArgument("no accuracy thresholds given");
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (!(levels[i].position_m > levels[i - 1].position_m &&
          levels[i].rotation_deg > levels[i - 1].rotation_deg)) {
      throw InvalidArgument(
          "accuracy thresholds must increase strictly in both components");
    }
  }
}

double LocalizedPercentage(std::span<const LocalizationResult> results,
                           const AccuracyThreshold& threshold) {
  if (results.empty()) throw InvalidArgument("no queries to evaluate");
  std::size_t localized = 0;
  for (const LocalizationResult& r : results) {
    if (r.ok() && r.error && r.error->position_m < threshold.position_m &&
        r.error->rotation_deg < threshold.rotation_deg) {
      ++localized;
    }
  }
  return 100.0 * static_cast<double>(localized) /
         static_cast<double>(results.size());
}

double PrecisionAtK(std::span<const ImageId> ranking,
                    std::span<const ImageId> relevant, std::size_t k) {
  if (k == 0) throw InvalidArgument("k must be >= 1");
  const std::size_t n = std::min(k, ranking.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) hits += Contains(relevant, ranking[i]);
  return static_cast<double>(hits) / static_cast<double>(k);
}

std::optional<double> AveragePrecision(std::span<const ImageId> ranking,
                                       std::span<const ImageId> relevant) {
  if (relevant.empty()) return std::nullopt;
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    if (Contains(relevant, ranking[i])) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  return sum / static_cast<double>(relevant.size());
}

std::map<ImageId, std::vector<ImageId>> RankedIds(const Ranking& ranking) {
  std::map<ImageId, std::vector<ImageId>> out;
  for (const auto& [query, list] : ranking) {
    auto& ids = out[query];
    ids.reserve(list.size());
    for (const RankedImage& r : list) ids.push_back(r.id);
  }
  return out;
}

RecallResult RecallAtK(const std::map<ImageId, std::vector<ImageId>>& rankings,
                       const RelevantSetMap& relevant, std::size_t k) {
  if (k == 0) throw InvalidArgument("k must be >= 1");
  RecallResult result;
  std::size_t hits = 0;
  for (const auto& [query, ranked] : rankings) {
    const auto rel = RelevantFor(relevant, query);
    if (rel.empty()) continue;
    ++result.eligible;
    const std::size_t n = std::min(k, ranked.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (Contains(rel, ranked[i])) {
        ++hits;
        break;
      }
    }
  }
  if (result.eligible == 0) {
    throw InvalidArgument("recall undefined: no query has a relevant image");
  }
  result.recall =
      static_cast<double>(hits) / static_cast<double>(result.eligible);
  return result;
}

double MeanPrecisionAtK(
    const std::map<ImageId, std::vector<ImageId>>& rankings,
    const RelevantSetMap& relevant, std::size_t k) {
  double sum = 0.0;
  std::size_t eligible = 0;
  for (const auto& [query, ranked] : rankings) {
    const auto rel = RelevantFor(relevant, query);
    if (rel.empty()) continue;
    sum += PrecisionAtK(ranked, rel, k);
    ++eligible;
  }
  if (eligible == 0) {
    throw InvalidArgument("precision undefined: no query has a relevant image");
  }
  return sum / static_cast<double>(eligible);
}

MapResult MeanAveragePrecision(
    const std::map<ImageId, std::vector<ImageId>>& rankings,
    const RelevantSetMap& relevant) {
  MapResult result;
  double sum = 0.0;
  std::size_t counted = 0;
  for (const auto& [query, ranked] : rankings) {
    const auto ap = AveragePrecision(ranked, RelevantFor(relevant, query));
    if (!ap) {
      result.skipped.push_back(query);
      continue;
    }
    sum += *ap;
    ++counted;
  }
  if (counted == 0) {
    throw InvalidArgument("mAP undefined: no query has a relevant image");
  }
  result.map = sum / static_cast<double>(counted);
  return result;
}

}  // namespace vlbench
