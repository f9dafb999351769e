// Deterministic result tables. Two serializations share the same rows: CSV
// with a leading manifest-reference comment, a header row, and floats at 17
// significant digits (round-trip exact); and newline-delimited JSON whose
// first line is a manifest-reference object followed by one object per row.
#pragma once

#include <string>
#include <variant>
#include <vector>

#include "cmv/types.hpp"

namespace cmv::io {

using Cell = std::variant<i64, double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> cells);
};

// %.17g, the shortest form that round-trips every double
std::string format_double(double v);

std::string to_csv(const Table& t, const std::string& manifestRef);
std::string to_ndjson(const Table& t, const std::string& manifestRef);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace cmv::io
