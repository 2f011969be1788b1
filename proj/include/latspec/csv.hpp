// CSV reading/writing used by the command-line tools and golden tests.
//
// Format: UTF-8, comma separators, LF line endings, one '#'-prefixed
// provenance comment, then a header row.  Numbers are written with 17
// significant digits so doubles round-trip exactly and outputs are stable
// byte-for-byte.
#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "latspec/errors.hpp"

namespace latspec {

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct CsvTable {
  std::vector<std::string> comments;  // '#' lines, prefix stripped
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  }

  std::vector<double> numeric_column(int index) const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
      if (index < 0 || index >= static_cast<int>(row.size()))
        throw invalid_argument_error("CSV row is missing column " +
                                     std::to_string(index));
      char* end = nullptr;
      const double v = std::strtod(row[index].c_str(), &end);
      if (end == row[index].c_str())
        throw invalid_argument_error("non-numeric CSV value '" + row[index] +
                                     "'");
      out.push_back(v);
    }
    return out;
  }
};

inline void write_csv(const std::string& path, const std::string& provenance,
                      const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw invalid_argument_error("cannot open '" + path + "' for writing");
  out << "# " << provenance << "\n";
  for (std::size_t i = 0; i < header.size(); ++i)
    out << header[i] << (i + 1 < header.size() ? "," : "");
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << row[i] << (i + 1 < row.size() ? "," : "");
    out << "\n";
  }
  if (!out)
    throw invalid_argument_error("failed while writing '" + path + "'");
}

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw invalid_argument_error("cannot open '" + path + "'");
  CsvTable table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::size_t start = 1;
      while (start < line.size() && line[start] == ' ') ++start;
      table.comments.push_back(line.substr(start));
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
    } else {
      table.rows.push_back(std::move(fields));
    }
  }
  if (!have_header)
    throw invalid_argument_error("'" + path + "' has no header row");
  return table;
}

}  // namespace latspec
