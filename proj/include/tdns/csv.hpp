#pragma once

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

namespace tdns {

std::string format_double(double x);  // shortest round-trippable-ish, %.12g

// Comma-separated table with '#' comment lines before the column header.
class CsvWriter {
 public:
  CsvWriter() = default;
  explicit CsvWriter(const std::filesystem::path& path);  // throws UsageError

  void open(const std::filesystem::path& path);
  bool is_open() const { return out_.is_open(); }

  void comment(const std::string& line);      // writes "# <line>"
  void comment_block(const std::string& text);  // one comment per line of text
  void columns(const std::vector<std::string>& names);
  void row(std::span<const double> values);
  void raw_row(const std::string& line);
  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
};

struct Table {
  std::vector<std::string> comments;  // without the leading "# "
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  int column_index(const std::string& name) const;  // -1 when absent
};

Table read_csv(const std::filesystem::path& path);  // throws UsageError

// Whitespace-separated numeric matrix, '#' comments allowed.
std::vector<std::vector<double>> read_matrix(const std::filesystem::path& path);

}  // namespace tdns
