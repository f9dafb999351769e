#include "cmv/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cmv::io {

void Table::add_row(std::vector<Cell> cells) {
  if (cells.size() != columns.size())
    throw std::invalid_argument("Table::add_row: cell count != column count");
  rows.push_back(std::move(cells));
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string csv_cell(const Cell& c) {
  if (std::holds_alternative<i64>(c)) return std::to_string(std::get<i64>(c));
  if (std::holds_alternative<double>(c)) return format_double(std::get<double>(c));
  return std::get<std::string>(c);  // values never contain commas or quotes
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char ch : s) {
    if (ch == '"' || ch == '\\') {
      out.push_back('\\');
      out.push_back(ch);
    } else if (static_cast<unsigned char>(ch) < 0x20) {
      char buf[8];
      std::snprintf(buf, sizeof(buf), "\\u%04x", ch);
      out += buf;
    } else {
      out.push_back(ch);
    }
  }
  return out;
}

std::string json_cell(const Cell& c) {
  if (std::holds_alternative<i64>(c)) return std::to_string(std::get<i64>(c));
  if (std::holds_alternative<double>(c)) {
    double v = std::get<double>(c);
    if (std::isfinite(v)) return format_double(v);
    // JSON has no infinities; keep them readable and machine-detectable
    return v > 0 ? "\"inf\"" : (v < 0 ? "\"-inf\"" : "\"nan\"");
  }
  return "\"" + json_escape(std::get<std::string>(c)) + "\"";
}

}  // namespace

std::string to_csv(const Table& t, const std::string& manifestRef) {
  std::ostringstream os;
  os << "# manifest: " << manifestRef << "\n";
  for (size_t i = 0; i < t.columns.size(); ++i)
    os << (i ? "," : "") << t.columns[i];
  os << "\n";
  for (const auto& row : t.rows) {
    for (size_t i = 0; i < row.size(); ++i)
      os << (i ? "," : "") << csv_cell(row[i]);
    os << "\n";
  }
  return os.str();
}

std::string to_ndjson(const Table& t, const std::string& manifestRef) {
  std::ostringstream os;
  os << "{\"manifest\":\"" << json_escape(manifestRef) << "\"}\n";
  for (const auto& row : t.rows) {
    os << "{";
    for (size_t i = 0; i < row.size(); ++i) {
      os << (i ? "," : "") << "\"" << json_escape(t.columns[i])
         << "\":" << json_cell(row[i]);
    }
    os << "}\n";
  }
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

}  // namespace cmv::io
