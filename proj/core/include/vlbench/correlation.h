#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vlbench/types.h"

namespace vlbench {

// Pearson correlation coefficient; std::nullopt ("undefined") when either
// variable is constant. Throws InvalidArgument for fewer than two pairs or
// mismatched lengths.
std::optional<double> Pearson(std::span<const double> a,
                              std::span<const double> b);

// 1-based ranks, ties receiving the mean of the ranks they span.
std::vector<double> AverageRanks(std::span<const double> values);

// Pearson correlation of the average-rank transforms.
std::optional<double> Spearman(std::span<const double> a,
                               std::span<const double> b);

// Metric value per k.
using KSeries = std::map<std::size_t, double>;

struct DistributionSummary {
  std::size_t count = 0;
  // 5th, 25th, 50th, 75th and 95th percentiles (linear interpolation).
  std::array<double, 5> quantiles{};
  // 20 equal-width bins over [-1, 1]; the last bin includes 1.
  std::array<std::size_t, 20> histogram{};
};

DistributionSummary Summarize(std::vector<double> values);

struct PerQueryCorrelation {
  // (feature, query) -> coefficient over the k grid.
  std::map<std::pair<std::string, ImageId>, std::optional<double>> coefficients;
  std::vector<std::pair<std::string, ImageId>> undefined;
  std::map<std::string, DistributionSummary> summary;
};

// For every feature and query, Pearson over k of (a_k, b_k). Only grid
// values present in both series are used; fewer than two makes the
// coefficient undefined.
PerQueryCorrelation CorrelatePerQuery(
    const std::map<std::string, std::map<ImageId, KSeries>>& metric_a,
    const std::map<std::string, std::map<ImageId, KSeries>>& metric_b,
    std::span<const std::size_t> k_grid);

struct ScatterPoint {
  std::string feature;
  std::size_t k = 0;
  double a = 0.0;
  double b = 0.0;
};

struct PerDatasetCorrelation {
  std::map<std::string, std::optional<double>> pearson_per_feature;
  std::map<std::size_t, std::optional<double>> spearman_per_k;
  std::vector<ScatterPoint> scatter;
};

// Pearson per feature across k, and Spearman per k across features.
// Spearman entries need at least two features with values at that k.
PerDatasetCorrelation CorrelatePerDataset(
    const std::map<std::string, KSeries>& metric_a,
    const std::map<std::string, KSeries>& metric_b,
    std::span<const std::size_t> k_grid);

}  // namespace vlbench
