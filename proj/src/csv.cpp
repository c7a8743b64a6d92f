#include "tdns/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "tdns/errors.hpp"

namespace tdns {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path) { open(path); }

void CsvWriter::open(const std::filesystem::path& path) {
  out_.open(path, std::ios::trunc);
  if (!out_) throw UsageError("cannot write " + path.string());
}

void CsvWriter::comment(const std::string& line) { out_ << "# " << line << '\n'; }

void CsvWriter::comment_block(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) comment(line);
}

void CsvWriter::columns(const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out_ << ',';
    out_ << names[i];
  }
  out_ << '\n';
}

void CsvWriter::row(std::span<const double> values) {
  char buf[40];
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out_ << ',';
    std::snprintf(buf, sizeof buf, "%.12g", values[i]);
    out_ << buf;
  }
  out_ << '\n';
}

void CsvWriter::raw_row(const std::string& line) { out_ << line << '\n'; }

int Table::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  return -1;
}

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

Table read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path.string());
  Table table;
  std::string line;
  bool have_columns = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::size_t b = 1;
      if (b < line.size() && line[b] == ' ') ++b;
      table.comments.push_back(line.substr(b));
      continue;
    }
    if (!have_columns) {
      table.columns = split_commas(line);
      have_columns = true;
      continue;
    }
    const auto fields = split_commas(line);
    if (fields.size() != table.columns.size())
      throw UsageError("ragged row in " + path.string());
    std::vector<double> row(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const char* s = fields[i].c_str();
      char* end = nullptr;
      row[i] = std::strtod(s, &end);
      if (end == s) throw UsageError("non-numeric field '" + fields[i] + "' in " + path.string());
    }
    table.rows.push_back(std::move(row));
  }
  if (!have_columns) throw UsageError("no header row in " + path.string());
  return table;
}

std::vector<std::vector<double>> read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::vector<double> row;
    const char* s = line.c_str();
    while (*s) {
      char* end = nullptr;
      const double v = std::strtod(s, &end);  // accepts nan/inf, unlike streams
      if (end == s) {
        while (*s == ' ' || *s == '\t' || *s == '\r') ++s;
        if (*s) throw UsageError("non-numeric field in " + path.string());
        break;
      }
      row.push_back(v);
      s = end;
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace tdns
