#include "vlbench/report.h"

#include <algorithm>
#include <array>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>

#include "vlbench/data_io.h"
#include "vlbench/text_format.h"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace vlbench {
namespace {

ordered_json OptionalNumber(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::string Csv(double v) { return FormatDouble(v); }

class ReportWriter {
 public:
  explicit ReportWriter(fs::path out_dir) : dir_(std::move(out_dir)) {}

  void Write(const fs::path& relative, const std::string& contents) {
    const fs::path path = dir_ / relative;
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("cannot write " + path.string());
    hashes_[relative.generic_string()] = Sha256Hex(contents);
    files_.push_back(relative);
  }

  const std::map<std::string, std::string>& hashes() const { return hashes_; }
  const std::vector<fs::path>& files() const { return files_; }

 private:
  fs::path dir_;
  std::map<std::string, std::string> hashes_;
  std::vector<fs::path> files_;
};

ordered_json ConfigJson(const BenchmarkConfig& c) {
  ordered_json j;
  j["k_grid"] = c.k_grid;
  std::vector<std::string> names;
  for (Paradigm p : c.paradigms) names.emplace_back(ToString(p));
  j["paradigms"] = names;
  names.clear();
  for (WeightingScheme s : c.schemes) names.emplace_back(ToString(s));
  j["schemes"] = names;
  names.clear();
  for (GtMethod m : c.gt_methods) names.emplace_back(ToString(m));
  j["gt_methods"] = names;
  j["features"] = c.features;
  j["gt"] = {{"tau_c_m", c.gt.rcp.tau_c_m},
             {"tau_r_deg", c.gt.rcp.tau_r_deg},
             {"relevant_position_m", c.gt.relevant_position_m},
             {"relevant_rotation_deg", c.gt.relevant_rotation_deg},
             {"frustum_near_m", c.gt.frustum_near_m},
             {"frustum_far_m", c.gt.frustum_far_m},
             {"max_rank", c.gt.max_rank}};
  j["csi"] = {{"alpha", c.csi.alpha}, {"min_similarity", c.csi.min_similarity}};
  ordered_json levels = ordered_json::array();
  for (const AccuracyThreshold& t : c.thresholds.levels) {
    levels.push_back({{"position_m", t.position_m}, {"rotation_deg", t.rotation_deg}});
  }
  j["thresholds"] = levels;
  const RansacConfig& r = c.localize.ransac;
  j["ransac"] = {{"inlier_px", r.inlier_px},
                 {"min_inliers", r.min_inliers},
                 {"max_iterations", r.max_iterations},
                 {"confidence", r.confidence}};
  j["triangulation"] = {{"min_angle_deg", c.localize.triangulation.min_angle_deg},
                        {"max_residual_px", c.localize.triangulation.max_residual_px}};
  j["lift_radius_px"] = c.localize.lift_radius_px;
  j["map_pairs"] = {
      {"mode", c.map_pairs.mode == PairSelection::Mode::kThreshold ? "threshold" : "top_n"},
      {"min_radius_m", c.map_pairs.min_radius_m},
      {"top_n", c.map_pairs.top_n},
      {"frustum_near_m", c.map_pairs.frustum_near_m},
      {"frustum_far_m", c.map_pairs.frustum_far_m}};
  j["blur"] = {{"cutoff", c.blur.cutoff}, {"threshold", c.blur.threshold}};
  j["dynamic_min_fraction"] = c.dynamic_min_fraction;
  return j;
}

ordered_json SummaryJson(const DistributionSummary& s) {
  return {{"count", s.count},
          {"q05", s.quantiles[0]},
          {"q25", s.quantiles[1]},
          {"q50", s.quantiles[2]},
          {"q75", s.quantiles[3]},
          {"q95", s.quantiles[4]},
          {"histogram", s.histogram}};
}

std::string ThresholdHeader(const BenchmarkConfig& config) {
  std::string out;
  for (const AccuracyThreshold& t : config.thresholds.levels) out += "," + t.Label();
  return out;
}

}  // namespace

std::string Sha256Hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(),
                 nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

std::string Sha256File(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFileError(path);
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  return Sha256Hex(bytes);
}

std::map<std::string, std::string> HashTree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    out[fs::relative(entry.path(), root).generic_string()] = Sha256File(entry.path());
  }
  return out;
}

ReportOutput EmitReports(const ReportBundle& bundle, const fs::path& out_dir,
                         const std::map<std::string, std::string>& inputs) {
  fs::create_directories(out_dir);
  ReportWriter writer(out_dir);
  const BenchmarkConfig& config = bundle.config;

  {
    std::ostringstream csv;
    csv << "source,method,k,query,status,position_m,rotation_deg,inliers\n";
    for (const Cell& cell : bundle.cells) {
      for (const auto& [k, results] : cell.results) {
        for (const LocalizationResult& r : results) {
          csv << cell.source << ',' << cell.method << ',' << k << ',' << r.query.value << ','
              << ToString(r.status) << ',';
          if (r.error) csv << Csv(r.error->position_m) << ',' << Csv(r.error->rotation_deg);
          else csv << ',';
          csv << ',' << r.num_inliers << '\n';
        }
      }
    }
    writer.Write("localization.csv", csv.str());
  }

  // Plot-ready localization series, one file per method, one row per
  // (source, k).
  {
    std::map<std::string, std::ostringstream> series;
    for (const Cell& cell : bundle.cells) {
      if (cell.error) continue;
      auto [it, fresh] = series.try_emplace(cell.method);
      if (fresh) it->second << "source,ground_truth,k" << ThresholdHeader(config) << '\n';
      for (const auto& [k, values] : cell.localized) {
        it->second << cell.source << ',' << (cell.ground_truth ? 1 : 0) << ',' << k;
        for (double v : values) it->second << ',' << Csv(v);
        it->second << '\n';
      }
    }
    for (const auto& [method, csv] : series) {
      writer.Write("series_" + method + ".csv", csv.str());
    }
  }

  {
    std::ostringstream csv;
    csv << "metric,feature,relevance,k,value\n";
    for (const RetrievalSeries& s : bundle.retrieval) {
      const std::string_view rel = ToString(s.relevance);
      for (const auto& [k, v] : s.precision) {
        csv << "precision," << s.feature << ',' << rel << ',' << k << ',' << Csv(v) << '\n';
      }
      for (const auto& [k, v] : s.recall) {
        csv << "recall," << s.feature << ',' << rel << ',' << k << ',' << Csv(v) << '\n';
      }
      if (s.mean_ap) {
        csv << "map," << s.feature << ',' << rel << ',' << config.k_grid.back() << ','
            << Csv(*s.mean_ap) << '\n';
      }
    }
    writer.Write("retrieval_metrics.csv", csv.str());
  }

  {
    std::ostringstream csv;
    csv << "method,avg_k,missing_pct\n";
    for (const auto& [m, st] : bundle.gt_statistics) {
      csv << ToString(m) << ',' << Csv(st.avg_k) << ',' << Csv(st.missing_pct) << '\n';
    }
    writer.Write("gt_statistics.csv", csv.str());
  }

  {
    ordered_json j;
    ordered_json per_dataset = ordered_json::array();
    std::ostringstream scatter;
    scatter << "method,threshold,relevance,metric,feature,k,retrieval,localized\n";
    for (const DatasetCorrelation& c : bundle.dataset_correlations) {
      ordered_json entry;
      entry["method"] = c.method;
      entry["threshold"] = c.threshold;
      entry["relevance"] = ToString(c.relevance);
      entry["metric"] = c.metric;
      ordered_json pearson = ordered_json::object();
      for (const auto& [f, v] : c.result.pearson_per_feature) pearson[f] = OptionalNumber(v);
      entry["pearson_per_feature"] = pearson;
      ordered_json spearman = ordered_json::object();
      for (const auto& [k, v] : c.result.spearman_per_k) {
        spearman[std::to_string(k)] = OptionalNumber(v);
      }
      entry["spearman_per_k"] = spearman;
      per_dataset.push_back(entry);
      for (const ScatterPoint& p : c.result.scatter) {
        scatter << c.method << ',' << c.threshold << ',' << ToString(c.relevance) << ','
                << c.metric << ',' << p.feature << ',' << p.k << ',' << Csv(p.a) << ','
                << Csv(p.b) << '\n';
      }
    }
    j["per_dataset"] = per_dataset;

    ordered_json per_query = ordered_json::array();
    std::ostringstream violin;
    violin << "method,relevance,feature,query,coefficient\n";
    for (const QueryCorrelation& c : bundle.query_correlations) {
      ordered_json entry;
      entry["method"] = c.method;
      entry["relevance"] = ToString(c.relevance);
      ordered_json summary = ordered_json::object();
      for (const auto& [f, s] : c.result.summary) summary[f] = SummaryJson(s);
      entry["summary"] = summary;
      ordered_json undefined = ordered_json::array();
      for (const auto& [f, q] : c.result.undefined) undefined.push_back({f, q.value});
      entry["undefined"] = undefined;
      per_query.push_back(entry);
      for (const auto& [key, v] : c.result.coefficients) {
        if (!v) continue;
        violin << c.method << ',' << ToString(c.relevance) << ',' << key.first << ','
               << key.second.value << ',' << Csv(*v) << '\n';
      }
    }
    j["per_query"] = per_query;
    writer.Write("correlation.json", j.dump(2) + "\n");
    writer.Write("scatter.csv", scatter.str());
    writer.Write("violin.csv", violin.str());
  }

  {
    std::ostringstream csv;
    csv << "method,gt,feature,k,threshold,gt_value,feature_value,gap\n";
    for (const GapRow& g : bundle.gaps) {
      csv << g.method << ',' << ToString(g.gt) << ',' << g.feature << ',' << g.k << ','
          << g.threshold << ',' << Csv(g.gt_value) << ',' << Csv(g.feature_value) << ','
          << Csv(g.gt_value - g.feature_value) << '\n';
    }
    writer.Write("upper_bound_gap.csv", csv.str());
  }

  {
    std::ostringstream csv;
    csv << "query,blur_mad,blurry,dynamic_fraction,dynamic\n";
    std::set<ImageId> ids;
    for (const auto& [q, b] : bundle.conditions.blur) ids.insert(q);
    for (const auto& [q, d] : bundle.conditions.dynamic) ids.insert(q);
    for (ImageId q : ids) {
      csv << q.value << ',';
      if (const auto b = bundle.conditions.blur.find(q); b != bundle.conditions.blur.end()) {
        csv << Csv(b->second.mad) << ',' << (b->second.blurry ? 1 : 0);
      } else {
        csv << ',';
      }
      csv << ',';
      if (const auto d = bundle.conditions.dynamic.find(q);
          d != bundle.conditions.dynamic.end()) {
        csv << Csv(d->second.fraction) << ',' << (d->second.dynamic ? 1 : 0);
      } else {
        csv << ',';
      }
      csv << '\n';
    }
    writer.Write("conditions.csv", csv.str());

    std::ostringstream ch;
    ch << "subset,source,method,k,threshold,subset_size,subset_value,all_value,delta\n";
    for (const ChallengeRow& r : bundle.challenge) {
      ch << r.subset << ',' << r.source << ',' << r.method << ',' << r.k << ','
         << r.threshold << ',' << r.subset_size << ',' << Csv(r.subset_value) << ','
         << Csv(r.all_value) << ',' << Csv(r.subset_value - r.all_value) << '\n';
    }
    writer.Write("challenge.csv", ch.str());
  }

  for (const auto& [source, ranking] : bundle.rankings) {
    std::ostringstream text;
    for (const auto& [query, list] : ranking) {
      for (std::size_t i = 0; i < list.size(); ++i) {
        text << query.value << ' ' << list[i].id.value << ' ' << FormatDouble(list[i].score)
             << ' ' << (i + 1) << ' ' << (list[i].relevant ? 1 : 0) << '\n';
      }
    }
    writer.Write(fs::path("rankings") / (source + ".txt"), text.str());
  }

  ordered_json manifest;
  manifest["config"] = ConfigJson(config);
  manifest["seeds"] = {{"master", config.seed},
                       {"derivation", "seed_seq(master, fnv1a(source), fnv1a(method), k, query)"}};
  manifest["inputs"] = inputs;
  manifest["features"] = bundle.features;
  manifest["global_map"] = {{"tracks", bundle.global_map.tracks},
                            {"inconsistent_splits", bundle.global_map.inconsistent_splits},
                            {"triangulated", bundle.global_map.triangulated},
                            {"degenerate", bundle.global_map.degenerate}};
  ordered_json failed = ordered_json::array();
  for (const Cell& c : bundle.cells) {
    if (c.error) failed.push_back({{"source", c.source}, {"method", c.method}, {"error", *c.error}});
  }
  manifest["failed_cells"] = failed;
  manifest["failures"] = bundle.failures;
  manifest["outputs"] = writer.hashes();
  const std::string manifest_text = manifest.dump(2) + "\n";
  writer.Write("manifest.json", manifest_text);

  ReportOutput out;
  out.files = writer.files();
  out.manifest_hash = Sha256Hex(manifest_text);
  return out;
}

}  // namespace vlbench
