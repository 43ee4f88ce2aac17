#include "vlbench/correlation.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace vlbench {
namespace {

bool IsConstant(std::span<const double> v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *lo == *hi;
}

double Mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) /
         static_cast<double>(v.size());
}

}  // namespace

std::optional<double> Pearson(std::span<const double> a,
                              std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InvalidArgument("correlation needs paired samples");
  }
  if (a.size() < 2) {
    throw InvalidArgument("correlation needs at least two pairs");
  }
  if (IsConstant(a) || IsConstant(b)) return std::nullopt;

  const double mean_a = Mean(a);
  const double mean_b = Mean(b);
  double cov = 0.0;
  double var_a = 0.0;
  double var_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - mean_a;
    const double db = b[i] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  if (var_a == 0.0 || var_b == 0.0) return std::nullopt;
  return std::clamp(cov / std::sqrt(var_a * var_b), -1.0, 1.0);
}

std::vector<double> AverageRanks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return values[i] < values[j];
  });
  std::vector<double> ranks(values.size());
  std::size_t start = 0;
  while (start < order.size()) {
    std::size_t end = start + 1;
    while (end < order.size() && values[order[end]] == values[order[start]]) {
      ++end;
    }
    // Positions start..end-1 hold ranks start+1..end.
    const double rank = 0.5 * static_cast<double>(start + 1 + end);
    for (std::size_t i = start; i < end; ++i) ranks[order[i]] = rank;
    start = end;
  }
  return ranks;
}

std::optional<double> Spearman(std::span<const double> a,
                               std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InvalidArgument("correlation needs paired samples");
  }
  const std::vector<double> ra = AverageRanks(a);
  const std::vector<double> rb = AverageRanks(b);
  return Pearson(ra, rb);
}

DistributionSummary Summarize(std::vector<double> values) {
  DistributionSummary summary;
  summary.count = values.size();
  if (values.empty()) return summary;
  std::sort(values.begin(), values.end());
  constexpr std::array<double, 5> kLevels = {0.05, 0.25, 0.5, 0.75, 0.95};
  for (std::size_t i = 0; i < kLevels.size(); ++i) {
    const double pos = kLevels[i] * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    summary.quantiles[i] = values[lo] + frac * (values[hi] - values[lo]);
  }
  for (double v : values) {
    const double scaled = (std::clamp(v, -1.0, 1.0) + 1.0) / 2.0 * 20.0;
    const auto bin = std::min<std::size_t>(static_cast<std::size_t>(scaled), 19);
    ++summary.histogram[bin];
  }
  return summary;
}

PerQueryCorrelation CorrelatePerQuery(
    const std::map<std::string, std::map<ImageId, KSeries>>& metric_a,
    const std::map<std::string, std::map<ImageId, KSeries>>& metric_b,
    std::span<const std::size_t> k_grid) {
  PerQueryCorrelation out;
  for (const auto& [feature, per_query_a] : metric_a) {
    const auto feature_b = metric_b.find(feature);
    if (feature_b == metric_b.end()) continue;
    std::vector<double> defined;
    for (const auto& [query, series_a] : per_query_a) {
      const auto query_b = feature_b->second.find(query);
      if (query_b == feature_b->second.end()) continue;
      std::vector<double> a;
      std::vector<double> b;
      for (std::size_t k : k_grid) {
        const auto ia = series_a.find(k);
        const auto ib = query_b->second.find(k);
        if (ia == series_a.end() || ib == query_b->second.end()) continue;
        a.push_back(ia->second);
        b.push_back(ib->second);
      }
      std::optional<double> rho;
      if (a.size() >= 2) rho = Pearson(a, b);
      out.coefficients[{feature, query}] = rho;
      if (rho) {
        defined.push_back(*rho);
      } else {
        out.undefined.emplace_back(feature, query);
      }
    }
    out.summary[feature] = Summarize(std::move(defined));
  }
  return out;
}

PerDatasetCorrelation CorrelatePerDataset(
    const std::map<std::string, KSeries>& metric_a,
    const std::map<std::string, KSeries>& metric_b,
    std::span<const std::size_t> k_grid) {
  PerDatasetCorrelation out;
  for (const auto& [feature, series_a] : metric_a) {
    const auto it = metric_b.find(feature);
    if (it == metric_b.end()) continue;
    std::vector<double> a;
    std::vector<double> b;
    for (std::size_t k : k_grid) {
      const auto ia = series_a.find(k);
      const auto ib = it->second.find(k);
      if (ia == series_a.end() || ib == it->second.end()) continue;
      a.push_back(ia->second);
      b.push_back(ib->second);
      out.scatter.push_back({feature, k, ia->second, ib->second});
    }
    out.pearson_per_feature[feature] =
        a.size() >= 2 ? Pearson(a, b) : std::nullopt;
  }

  for (std::size_t k : k_grid) {
    std::vector<double> a;
    std::vector<double> b;
    for (const auto& [feature, series_a] : metric_a) {
      const auto it = metric_b.find(feature);
      if (it == metric_b.end()) continue;
      const auto ia = series_a.find(k);
      const auto ib = it->second.find(k);
      if (ia == series_a.end() || ib == it->second.end()) continue;
      a.push_back(ia->second);
      b.push_back(ib->second);
    }
    out.spearman_per_k[k] = a.size() >= 2 ? Spearman(a, b) : std::nullopt;
  }
  return out;
}

}  // namespace vlbench
