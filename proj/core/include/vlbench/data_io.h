#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "vlbench/challenge.h"
#include "vlbench/gt_ranking.h"
#include "vlbench/localize.h"
#include "vlbench/retrieval.h"
#include "vlbench/scene_map.h"
#include "vlbench/types.h"

namespace vlbench {

// Base of every dataset loading failure.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MissingFileError : public DataError {
 public:
  explicit MissingFileError(const std::filesystem::path& path);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

class ParseError : public DataError {
 public:
  ParseError(const std::filesystem::path& file, std::size_t line,
             const std::string& what);
  const std::filesystem::path& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  std::filesystem::path file_;
  std::size_t line_;
};

class IntegrityError : public DataError {
 public:
  using DataError::DataError;
};

struct Dataset {
  // Every image with its pose and intrinsics. Points and observations are
  // present when the dataset ships a map.
  SceneMap scene;
  std::vector<ImageId> database;
  std::vector<ImageId> queries;
  // Feature name -> descriptor per image.
  std::map<std::string, DescriptorTable> descriptors;
  MatchStore matches;
  std::map<ImageId, LabelMask> masks;
  std::set<std::uint8_t> known_labels;
  std::set<std::uint8_t> dynamic_labels;
  std::map<ImageId, GrayImage> images;
  std::vector<std::string> warnings;

  bool HasMap() const { return !scene.Points().empty(); }
};

// Reads the directory layout written by SaveDataset. Throws
// MissingFileError, ParseError (with file and line) or IntegrityError.
Dataset LoadDataset(const std::filesystem::path& root);

// Writes poses.txt, intrinsics.txt, image_cameras.txt, images.txt,
// points.txt, observations.txt, descriptors/, matches/, masks/ and images/.
void SaveDataset(const Dataset& dataset, const std::filesystem::path& root);

// Binary descriptor matrix: "VLBDESC1", u32 rows, u32 cols, then row-major
// little-endian float32; the ids live in a sidecar text file.
void WriteDescriptorMatrix(const std::filesystem::path& bin,
                           const std::filesystem::path& ids,
                           const DescriptorTable& table);
DescriptorTable ReadDescriptorMatrix(const std::filesystem::path& bin,
                                     const std::filesystem::path& ids);

// Lines `query_id db_id score rank relevant`; the last column is optional on
// input.
void WriteRanking(const std::filesystem::path& path, const Ranking& ranking);
Ranking ReadRanking(const std::filesystem::path& path);

// Lines `image_a ax ay image_b bx by`.
void WriteMatches(const std::filesystem::path& path, const MatchStore& matches);
void ReadMatches(const std::filesystem::path& path, MatchStore* matches);

// Lines `query_id status qw qx qy qz cx cy cz inliers`.
void WriteLocalizationResults(const std::filesystem::path& path,
                              const std::vector<LocalizationResult>& results);
std::vector<LocalizationResult> ReadLocalizationResults(
    const std::filesystem::path& path);

// Binary 8-bit PGM (P5) or PPM (P6, converted to luminance).
GrayImage ReadPnm(const std::filesystem::path& path);
void WritePgm(const std::filesystem::path& path, const GrayImage& image);
LabelMask ReadLabelMask(const std::filesystem::path& path);
void WriteLabelMask(const std::filesystem::path& path, const LabelMask& mask);

}  // namespace vlbench
