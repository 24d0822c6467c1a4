#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <type_traits>
#include <vector>

#include "sparsekit/errors.hpp"

namespace sparsekit {

// Shortest representation with 9 significant digits; locale independent.
inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

template <typename T>
  requires std::is_integral_v<T>
inline std::string format_number(T v) {
  return std::to_string(v);
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row) {
    if (row.size() != header.size())
      throw io_error("CsvTable: row width does not match header");
    rows.push_back(std::move(row));
  }
};

// UTF-8, comma separated, LF line endings, header row first. Byte identical
// for identical inputs.
inline void emit_csv(const CsvTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw io_error("emit_csv: cannot open '" + path + "' for writing");
  const auto write_row = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << row[i];
    }
    out << '\n';
  };
  write_row(table.header);
  for (const auto& row : table.rows) write_row(row);
  out.flush();
  if (!out)
    throw io_error("emit_csv: write to '" + path + "' failed");
}

}  // namespace sparsekit
