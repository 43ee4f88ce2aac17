#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vlbench {

// Shortest decimal text that parses back to exactly `value`.
std::string FormatDouble(double value);

std::optional<double> ParseDouble(std::string_view text);
std::optional<std::uint64_t> ParseUint(std::string_view text);
std::optional<int> ParseInt(std::string_view text);

// Whitespace-separated fields.
std::vector<std::string_view> SplitFields(std::string_view line);

// Reads a text file line by line, skipping blank lines and '#' comments.
class LineReader {
 public:
  explicit LineReader(const std::filesystem::path& path);

  bool is_open() const { return in_.is_open(); }
  // Fields of the next content line; false at end of file.
  bool Next(std::vector<std::string_view>* fields);
  std::size_t line_number() const { return line_number_; }

 private:
  std::ifstream in_;
  std::string line_;
  std::size_t line_number_ = 0;
};

}  // namespace vlbench
