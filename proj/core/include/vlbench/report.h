#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "vlbench/benchmark_runner.h"

namespace vlbench {

// Lower-case hex SHA-256.
std::string Sha256Hex(std::string_view bytes);
std::string Sha256File(const std::filesystem::path& path);

// SHA-256 of every regular file under `root`, keyed by the path relative to
// `root` with forward slashes.
std::map<std::string, std::string> HashTree(const std::filesystem::path& root);

struct ReportOutput {
  std::vector<std::filesystem::path> files;  // relative to out_dir, manifest last
  std::string manifest_hash;
};

// Writes the CSV tables, correlation JSON, rankings and manifest.json into
// `out_dir`. The manifest holds the configuration, seeds, `inputs` hashes,
// failed cells and the hash of every other emitted file; no timings, so the
// same bundle always produces the same bytes.
ReportOutput EmitReports(const ReportBundle& bundle, const std::filesystem::path& out_dir,
                         const std::map<std::string, std::string>& inputs);

}  // namespace vlbench
