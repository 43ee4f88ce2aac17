// vlbench: synthetic dataset generation, GT ranking, localization, metrics,
// correlation, challenge conditions and the full benchmark pipeline.

#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vlbench/benchmark_runner.h"
#include "vlbench/correlation.h"
#include "vlbench/data_io.h"
#include "vlbench/report.h"
#include "vlbench/retrieval.h"
#include "vlbench/synth.h"
#include "vlbench/text_format.h"

namespace fs = std::filesystem;
using namespace vlbench;

namespace {

constexpr int kCellFailed = 1;
constexpr int kError = 2;

struct SynthOptions {
  std::string layout = "grid";
  SynthDatasetConfig cfg;
  double noise_sigma = 0.02;
  bool no_challenge = false;
};

void AddSynthOptions(CLI::App* app, SynthOptions* o) {
  SynthConfig& s = o->cfg.scene;
  app->add_option("--layout", o->layout, "grid, corridor or loop")->capture_default_str();
  app->add_option("--n-db", s.n_db)->capture_default_str();
  app->add_option("--n-query", s.n_query)->capture_default_str();
  app->add_option("--n-points", s.n_points)->capture_default_str();
  app->add_option("--n-missing", s.n_missing, "queries far from everything")
      ->capture_default_str();
  app->add_option("--pixel-noise", s.pixel_noise)->capture_default_str();
  app->add_option("--spacing", s.spacing_m)->capture_default_str();
  app->add_option("--synth-seed", s.seed)->capture_default_str();
  app->add_option("--descriptor-noise", o->noise_sigma, "sigma of the 'noisy' feature")
      ->capture_default_str();
  app->add_option("--inlier-noise", o->cfg.matches.inlier_noise_px)->capture_default_str();
  app->add_option("--outlier-ratio", o->cfg.matches.outlier_ratio)->capture_default_str();
  app->add_flag("--no-challenge", o->no_challenge, "skip query images and masks");
}

SynthDatasetConfig Finish(SynthOptions o) {
  o.cfg.scene.layout = ParseSceneLayout(o.layout);
  for (auto& [name, model] : o.cfg.features) {
    if (model.mode == DescriptorMode::kPosePlusNoise) model.noise_sigma = o.noise_sigma;
  }
  o.cfg.challenge = !o.no_challenge;
  return o.cfg;
}

struct ConfigOptions {
  BenchmarkConfig cfg;
  std::vector<std::string> paradigms = {"p1", "p2a", "p2b"};
  std::vector<std::string> schemes = {"ewb", "bdi", "csi"};
  std::vector<std::string> gt_methods = {"rcp", "frustum", "coobs"};
};

void AddConfigOptions(CLI::App* app, ConfigOptions* o) {
  BenchmarkConfig& c = o->cfg;
  app->add_option("--k-grid", c.k_grid, "ascending, each in [1, 50]")->capture_default_str();
  app->add_option("--paradigms", o->paradigms)->capture_default_str();
  app->add_option("--schemes", o->schemes)->capture_default_str();
  app->add_option("--gt-methods", o->gt_methods)->capture_default_str();
  app->add_option("--features", c.features, "default: every feature in the dataset");
  app->add_option("--seed", c.seed)->capture_default_str();
  app->add_option("--csi-alpha", c.csi.alpha)->capture_default_str();
  app->add_option("--tau-c", c.gt.rcp.tau_c_m)->capture_default_str();
  app->add_option("--tau-r", c.gt.rcp.tau_r_deg)->capture_default_str();
  app->add_option("--frustum-far", c.gt.frustum_far_m)->capture_default_str();
  app->add_option("--inlier-px", c.localize.ransac.inlier_px)->capture_default_str();
  app->add_option("--min-inliers", c.localize.ransac.min_inliers)->capture_default_str();
  app->add_option("--max-iterations", c.localize.ransac.max_iterations)
      ->capture_default_str();
  app->add_option("--blur-cutoff", c.blur.cutoff)->capture_default_str();
  app->add_option("--blur-threshold", c.blur.threshold)->capture_default_str();
  app->add_option("--dynamic-fraction", c.dynamic_min_fraction)->capture_default_str();
}

BenchmarkConfig Finish(ConfigOptions o) {
  o.cfg.paradigms.clear();
  for (const auto& p : o.paradigms) o.cfg.paradigms.push_back(ParseParadigm(p));
  o.cfg.schemes.clear();
  for (const auto& s : o.schemes) o.cfg.schemes.push_back(ParseWeightingScheme(s));
  o.cfg.gt_methods.clear();
  for (const auto& m : o.gt_methods) o.cfg.gt_methods.push_back(ParseGtMethod(m));
  o.cfg.Validate();
  return o.cfg;
}

// A ranking from a file, a descriptor feature, or a GT method.
struct RankingChoice {
  std::string file;
  std::string feature;
  std::string gt;
};

void AddRankingOptions(CLI::App* app, RankingChoice* r) {
  auto* file = app->add_option("--ranking", r->file, "ranking file");
  auto* feature = app->add_option("--feature", r->feature, "descriptor feature");
  auto* gt = app->add_option("--gt", r->gt, "GT method: rcp, frustum, coobs");
  file->excludes(feature)->excludes(gt);
  feature->excludes(gt);
}

Ranking ResolveRanking(const RankingChoice& r, const Dataset& ds, std::size_t depth) {
  if (!r.file.empty()) return ReadRanking(r.file);
  if (!r.feature.empty()) {
    const auto it = ds.descriptors.find(r.feature);
    if (it == ds.descriptors.end()) {
      throw InvalidArgument("feature '" + r.feature + "' not in dataset");
    }
    return RankByDescriptors(ds.queries, ds.database, it->second, depth);
  }
  if (!r.gt.empty()) {
    GtConfig cfg;
    cfg.max_rank = depth;
    return BuildGtRanking(ParseGtMethod(r.gt), ds.queries, ds.database, ds.scene, cfg).ranking;
  }
  throw InvalidArgument("one of --ranking, --feature or --gt is required");
}

void PrintWarnings(const Dataset& ds) {
  for (const std::string& w : ds.warnings) std::cerr << "warning: " << w << '\n';
}

// Series CSV with header columns feature, k, value and optionally query.
struct SeriesFile {
  std::map<std::string, KSeries> per_feature;
  std::map<std::string, std::map<ImageId, KSeries>> per_query;
  bool has_query = false;
};

SeriesFile ReadSeriesCsv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingFileError(path);
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path, 1, "empty file");
  const auto header = split(line);
  auto column = [&](const std::string& name) -> int {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
  };
  const int cf = column("feature"), ck = column("k"), cv = column("value"),
            cq = column("query");
  if (cf < 0 || ck < 0 || cv < 0) {
    throw ParseError(path, 1, "header needs feature, k and value columns");
  }
  SeriesFile out;
  out.has_query = cq >= 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw ParseError(path, line_no, "expected " + std::to_string(header.size()) + " columns");
    }
    const auto k = ParseUint(cells[ck]);
    const auto v = ParseDouble(cells[cv]);
    if (!k || !v) throw ParseError(path, line_no, "bad k or value");
    if (out.has_query) {
      const auto q = ParseUint(cells[cq]);
      if (!q) throw ParseError(path, line_no, "bad query id");
      out.per_query[cells[cf]][ImageId(*q)][*k] = *v;
    } else {
      out.per_feature[cells[cf]][*k] = *v;
    }
  }
  return out;
}

void Emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::trunc);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + out_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Visual localization benchmark toolkit"};
  app.require_subcommand(1);
  int exit_code = 0;

  // synth
  auto* synth = app.add_subcommand("synth", "write a synthetic dataset");
  SynthOptions synth_opts;
  std::string synth_out;
  synth->add_option("--out", synth_out, "dataset directory")->required();
  AddSynthOptions(synth, &synth_opts);
  synth->callback([&] {
    const Dataset ds = BuildSyntheticDataset(Finish(synth_opts));
    SaveDataset(ds, synth_out);
    std::cout << "wrote " << ds.database.size() << " database images, " << ds.queries.size()
              << " queries, " << ds.scene.Points().size() << " points, "
              << ds.matches.size() << " matches to " << synth_out << '\n';
  });

  // gt-rank
  auto* gt_rank = app.add_subcommand("gt-rank", "ground-truth ranking of a dataset");
  std::string gt_dataset, gt_method = "rcp", gt_out;
  GtConfig gt_cfg;
  gt_rank->add_option("--dataset", gt_dataset)->required();
  gt_rank->add_option("--method", gt_method, "rcp, frustum or coobs")->capture_default_str();
  gt_rank->add_option("--out", gt_out, "ranking file")->required();
  gt_rank->add_option("--max-rank", gt_cfg.max_rank)->capture_default_str();
  gt_rank->add_option("--tau-c", gt_cfg.rcp.tau_c_m)->capture_default_str();
  gt_rank->add_option("--tau-r", gt_cfg.rcp.tau_r_deg)->capture_default_str();
  gt_rank->add_option("--frustum-far", gt_cfg.frustum_far_m)->capture_default_str();
  gt_rank->callback([&] {
    const Dataset ds = LoadDataset(gt_dataset);
    PrintWarnings(ds);
    const GroundTruthRanking gt = BuildGtRanking(ParseGtMethod(gt_method), ds.queries,
                                                 ds.database, ds.scene, gt_cfg);
    WriteRanking(gt_out, gt.ranking);
    const GtStatistics st = ComputeGtStatistics(gt.ranking, gt_cfg.max_rank);
    std::cout << "method " << gt_method << " avg_k " << FormatDouble(st.avg_k)
              << " missing_pct " << FormatDouble(st.missing_pct) << '\n';
  });

  // localize
  auto* localize = app.add_subcommand("localize", "localize queries for one ranking and k");
  std::string loc_dataset, loc_paradigm = "p1", loc_scheme = "ewb", loc_out;
  RankingChoice loc_rank;
  ConfigOptions loc_cfg;
  std::size_t loc_k = 5;
  localize->add_option("--dataset", loc_dataset)->required();
  localize->add_option("--paradigm", loc_paradigm, "p1, p2a or p2b")->capture_default_str();
  localize->add_option("--scheme", loc_scheme, "ewb, bdi or csi (p1 only)")
      ->capture_default_str();
  localize->add_option("-k", loc_k)->capture_default_str();
  localize->add_option("--out", loc_out, "results file")->required();
  localize->add_option("--seed", loc_cfg.cfg.seed)->capture_default_str();
  localize->add_option("--inlier-px", loc_cfg.cfg.localize.ransac.inlier_px)
      ->capture_default_str();
  localize->add_option("--min-inliers", loc_cfg.cfg.localize.ransac.min_inliers)
      ->capture_default_str();
  AddRankingOptions(localize, &loc_rank);
  localize->callback([&] {
    const Dataset ds = LoadDataset(loc_dataset);
    PrintWarnings(ds);
    BenchmarkConfig cfg = loc_cfg.cfg;
    cfg.k_grid = {loc_k};
    cfg.Validate();
    const Ranking ranking = ResolveRanking(loc_rank, ds, loc_k);
    const Paradigm paradigm = ParseParadigm(loc_paradigm);
    const WeightingScheme scheme = ParseWeightingScheme(loc_scheme);
    const DescriptorTable* descriptors = nullptr;
    if (!loc_rank.feature.empty()) descriptors = &ds.descriptors.at(loc_rank.feature);
    std::optional<SceneMap> map;
    if (paradigm == Paradigm::kGlobalMap) map = BuildGlobalMap(ds, cfg);
    const std::string source = !loc_rank.file.empty()    ? fs::path(loc_rank.file).stem().string()
                               : !loc_rank.feature.empty() ? loc_rank.feature
                                                           : "gt-" + loc_rank.gt;
    try {
      const Cell cell = RunCell(ds, source, !loc_rank.gt.empty(), ranking, paradigm, scheme,
                                descriptors, map ? &*map : nullptr, cfg);
      WriteLocalizationResults(loc_out, cell.results.at(loc_k));
      const auto& levels = cfg.thresholds.levels;
      for (std::size_t t = 0; t < levels.size(); ++t) {
        std::cout << levels[t].Label() << ' ' << FormatDouble(cell.localized.at(loc_k)[t])
                  << '\n';
      }
    } catch (const std::exception& e) {
      std::cerr << "cell " << source << '/' << loc_paradigm << " failed: " << e.what() << '\n';
      exit_code = kCellFailed;
    }
  });

  // metrics
  auto* metrics = app.add_subcommand("metrics", "retrieval metrics of one ranking");
  std::string met_dataset, met_relevance = "rcp", met_out;
  RankingChoice met_rank;
  std::vector<std::size_t> met_grid = {1, 2, 3, 4, 5, 10, 20, 50};
  metrics->add_option("--dataset", met_dataset)->required();
  metrics->add_option("--relevance", met_relevance, "GT method defining relevance")
      ->capture_default_str();
  metrics->add_option("--k-grid", met_grid)->capture_default_str();
  metrics->add_option("--out", met_out, "CSV file (default stdout)");
  AddRankingOptions(metrics, &met_rank);
  metrics->callback([&] {
    const Dataset ds = LoadDataset(met_dataset);
    PrintWarnings(ds);
    BenchmarkConfig check;
    check.k_grid = met_grid;
    check.Validate();
    const Ranking ranking = ResolveRanking(met_rank, ds, met_grid.back());
    const auto relevant = RelevantSets(ParseGtMethod(met_relevance), ds.queries, ds.database,
                                       ds.scene);
    const auto ranked = RankedIds(ranking);
    std::ostringstream csv;
    csv << "metric,k,value\n";
    for (std::size_t k : met_grid) {
      csv << "precision," << k << ',' << FormatDouble(MeanPrecisionAtK(ranked, relevant, k))
          << '\n';
    }
    for (std::size_t k : met_grid) {
      csv << "recall," << k << ',' << FormatDouble(RecallAtK(ranked, relevant, k).recall)
          << '\n';
    }
    csv << "map," << met_grid.back() << ','
        << FormatDouble(MeanAveragePrecision(ranked, relevant).map) << '\n';
    Emit(csv.str(), met_out);
  });

  // correlate
  auto* correlate = app.add_subcommand("correlate", "correlate two metric series files");
  std::string cor_a, cor_b, cor_out;
  std::vector<std::size_t> cor_grid = {1, 2, 3, 4, 5, 10, 20, 50};
  correlate->add_option("--a", cor_a, "CSV with feature,k,value[,query]")->required();
  correlate->add_option("--b", cor_b, "CSV with the same columns")->required();
  correlate->add_option("--k-grid", cor_grid)->capture_default_str();
  correlate->add_option("--out", cor_out, "JSON file (default stdout)");
  correlate->callback([&] {
    const SeriesFile a = ReadSeriesCsv(cor_a);
    const SeriesFile b = ReadSeriesCsv(cor_b);
    if (a.has_query != b.has_query) {
      throw InvalidArgument("both files must be per-query or both per-feature");
    }
    nlohmann::ordered_json j;
    auto num = [](const std::optional<double>& v) {
      return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
    };
    if (a.has_query) {
      const PerQueryCorrelation r = CorrelatePerQuery(a.per_query, b.per_query, cor_grid);
      for (const auto& [key, v] : r.coefficients) {
        j["coefficients"][key.first][std::to_string(key.second.value)] = num(v);
      }
      for (const auto& [f, s] : r.summary) {
        j["summary"][f] = {{"count", s.count}, {"quantiles", s.quantiles},
                           {"histogram", s.histogram}};
      }
    } else {
      const PerDatasetCorrelation r = CorrelatePerDataset(a.per_feature, b.per_feature, cor_grid);
      for (const auto& [f, v] : r.pearson_per_feature) j["pearson_per_feature"][f] = num(v);
      for (const auto& [k, v] : r.spearman_per_k) j["spearman_per_k"][std::to_string(k)] = num(v);
    }
    Emit(j.dump(2) + "\n", cor_out);
  });

  // challenge
  auto* challenge = app.add_subcommand("challenge", "blur and dynamic-object conditions");
  std::string ch_dataset, ch_out;
  BenchmarkConfig ch_cfg;
  challenge->add_option("--dataset", ch_dataset)->required();
  challenge->add_option("--blur-cutoff", ch_cfg.blur.cutoff)->capture_default_str();
  challenge->add_option("--blur-threshold", ch_cfg.blur.threshold)->capture_default_str();
  challenge->add_option("--dynamic-fraction", ch_cfg.dynamic_min_fraction)
      ->capture_default_str();
  challenge->add_option("--out", ch_out, "CSV file (default stdout)");
  challenge->callback([&] {
    const Dataset ds = LoadDataset(ch_dataset);
    PrintWarnings(ds);
    std::vector<std::string> failures;
    const QueryConditions c = ComputeQueryConditions(ds, ch_cfg, &failures);
    std::ostringstream csv;
    csv << "query,blur_mad,blurry,dynamic_fraction,dynamic,unknown_pixels\n";
    for (ImageId q : ds.queries) {
      const auto b = c.blur.find(q);
      const auto d = c.dynamic.find(q);
      if (b == c.blur.end() && d == c.dynamic.end()) continue;
      csv << q.value << ',';
      if (b != c.blur.end()) csv << FormatDouble(b->second.mad) << ',' << b->second.blurry;
      else csv << ',';
      csv << ',';
      if (d != c.dynamic.end()) {
        csv << FormatDouble(d->second.fraction) << ',' << d->second.dynamic << ','
            << d->second.unknown_pixels;
      } else {
        csv << ",,";
      }
      csv << '\n';
    }
    Emit(csv.str(), ch_out);
    for (const std::string& f : failures) std::cerr << "failed: " << f << '\n';
    if (!failures.empty()) exit_code = kCellFailed;
  });

  // run
  auto* run = app.add_subcommand("run", "full benchmark with reports");
  std::string run_dataset, run_out;
  ConfigOptions run_cfg;
  SynthOptions run_synth;
  run->add_option("--dataset", run_dataset,
                  "dataset directory; default: generate the synthetic dataset into "
                  "<out>/dataset");
  run->add_option("--out", run_out, "report directory")->required();
  AddConfigOptions(run, &run_cfg);
  AddSynthOptions(run, &run_synth);
  run->callback([&] {
    const BenchmarkConfig cfg = Finish(run_cfg);
    fs::path dataset_dir = run_dataset;
    if (dataset_dir.empty()) {
      dataset_dir = fs::path(run_out) / "dataset";
      fs::remove_all(dataset_dir);
      SaveDataset(BuildSyntheticDataset(Finish(run_synth)), dataset_dir);
    }
    // Always evaluate what is on disk, so input hashes describe the inputs.
    const Dataset ds = LoadDataset(dataset_dir);
    PrintWarnings(ds);
    const ReportBundle bundle = RunBenchmark(ds, cfg);
    const fs::path report_dir = fs::path(run_out) / "report";
    fs::remove_all(report_dir);
    const ReportOutput out = EmitReports(bundle, report_dir, HashTree(dataset_dir));
    for (const std::string& f : bundle.failures) std::cerr << "failed: " << f << '\n';
    std::cout << "cells " << bundle.cells.size() << " failures " << bundle.failures.size()
              << '\n'
              << "manifest " << out.manifest_hash << '\n';
    if (!bundle.ok()) exit_code = kCellFailed;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  }
  return exit_code;
}
